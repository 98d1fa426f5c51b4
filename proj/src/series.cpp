#include "fractsect/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "fractsect/error.hpp"

namespace fractsect {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidSeries: return "InvalidSeries";
    case ErrorCode::WrongKind: return "WrongKind";
    case ErrorCode::LagTooLarge: return "LagTooLarge";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::InsufficientExtrema: return "InsufficientExtrema";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::BadBounds: return "BadBounds";
    case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::RegimeTooSparse: return "RegimeTooSparse";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::MissingQ2: return "MissingQ2";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::EmbeddingFailure: return "EmbeddingFailure";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> row)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      row_(row) {}

std::string_view to_string(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::Prices: return "prices";
    case SeriesKind::LogReturns: return "log-returns";
    case SeriesKind::Profile: return "profile";
    case SeriesKind::Synthetic: return "synthetic";
  }
  return "unknown";
}

Series::Series(std::vector<double> values, SeriesKind kind, std::string label,
               std::int64_t t0_index)
    : values_(std::move(values)),
      kind_(kind),
      label_(std::move(label)),
      t0_index_(t0_index) {
  const std::size_t min_len = kind_ == SeriesKind::Prices ? 2 : 1;
  if (values_.size() < min_len) {
    throw Error(ErrorCode::InvalidSeries,
                std::string(to_string(kind_)) + " series needs at least " +
                    std::to_string(min_len) + " values");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::InvalidSeries,
                  "non-finite value at index " + std::to_string(i));
    }
    if (kind_ == SeriesKind::Prices && values_[i] <= 0.0) {
      throw Error(ErrorCode::NonPositivePrice,
                  "price at index " + std::to_string(i) + " is not positive",
                  i + 1);
    }
  }
}

void SectorMeta::validate() const {
  if (symbol.empty()) throw Error(ErrorCode::BadConfig, "empty sector symbol");
  if (stock_count < 1) {
    throw Error(ErrorCode::BadConfig, "sector " + symbol + " has no stocks");
  }
}

const std::vector<SectorMeta>& bse_sectors() {
  static const std::vector<SectorMeta> table = {
      {"AU", "Auto", 15},
      {"BM", "Basic Materials", 189},
      {"BX", "Bankex", 10},
      {"CD", "Consumer Durables", 12},
      {"CDGS", "Consumer Discretionary Goods & Services", 297},
      {"CG", "Capital Goods", 25},
      {"CPSE", "CPSE", 52},
      {"EG", "Energy", 27},
      {"FMCG", "Fast Moving Consumer Goods", 81},
      {"FN", "Financials", 139},
      {"HC", "Healthcare", 96},
      {"ID", "Industrials", 203},
      {"II", "India Infrastructure", 30},
      {"IT", "Information Technology", 62},
      {"MT", "Metal", 10},
      {"ONG", "Oil & Gas", 10},
      {"PSU", "PSU", 56},
      {"PWR", "Power", 11},
      {"RE", "Realty", 10},
      {"TC", "Telecom", 17},
      {"Teck", "Teck", 28},
      {"UT", "Utilities", 24},
  };
  return table;
}

const SectorMeta* find_bse_sector(std::string_view symbol) {
  const auto& table = bse_sectors();
  auto it = std::find_if(table.begin(), table.end(),
                         [&](const SectorMeta& m) { return m.symbol == symbol; });
  return it == table.end() ? nullptr : &*it;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Splits one CSV record. Double-quoted fields may contain commas; embedded
// quotes are written as "".
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.emplace_back(trim(field));
  return fields;
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

Series load_series(std::istream& source, std::string_view date_column,
                   std::string_view value_column, std::string label) {
  std::string line;
  bool have_header = false;
  while (std::getline(source, line)) {
    if (!is_blank(line)) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw Error(ErrorCode::EmptyInput, "no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_csv(line);
  auto column_index = [&](std::string_view name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorCode::MissingColumn, "column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t date_idx = column_index(date_column);
  const std::size_t value_idx = column_index(value_column);
  const std::size_t needed = std::max(date_idx, value_idx) + 1;

  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(source, line)) {
    if (is_blank(line)) continue;
    ++row;
    const auto fields = split_csv(line);
    if (fields.size() < needed) {
      throw Error(ErrorCode::MalformedCsv,
                  "row " + std::to_string(row) + " has " +
                      std::to_string(fields.size()) + " fields",
                  row);
    }
    double value = 0.0;
    if (!parse_double(fields[value_idx], value) || !std::isfinite(value)) {
      throw Error(ErrorCode::MalformedCsv,
                  "row " + std::to_string(row) + ": cannot parse '" +
                      fields[value_idx] + "'",
                  row);
    }
    if (value <= 0.0) {
      throw Error(ErrorCode::NonPositivePrice,
                  "row " + std::to_string(row) + ": " + fields[value_idx], row);
    }
    values.push_back(value);
  }
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "no data rows");
  if (values.size() < 2) {
    throw Error(ErrorCode::InvalidSeries, "a price series needs at least 2 rows");
  }
  return Series(std::move(values), SeriesKind::Prices, std::move(label));
}

Series log_returns(const Series& prices, std::size_t lag) {
  if (prices.kind() != SeriesKind::Prices) {
    throw Error(ErrorCode::WrongKind, "log_returns expects prices, got " +
                                          std::string(to_string(prices.kind())));
  }
  if (lag == 0 || lag >= prices.size()) {
    throw Error(ErrorCode::LagTooLarge,
                "lag " + std::to_string(lag) + " for series of length " +
                    std::to_string(prices.size()));
  }
  std::vector<double> out(prices.size() - lag);
  for (std::size_t t = 0; t < out.size(); ++t) {
    // Log of the ratio: a common price scale cancels before rounding.
    out[t] = std::log(prices[t + lag] / prices[t]);
  }
  return Series(std::move(out), SeriesKind::LogReturns, prices.label(),
                prices.t0_index());
}

Series profile(const Series& x) {
  if (x.kind() != SeriesKind::LogReturns && x.kind() != SeriesKind::Synthetic) {
    throw Error(ErrorCode::WrongKind, "profile expects returns or synthetic data, got " +
                                          std::string(to_string(x.kind())));
  }
  // Neumaier-compensated sums keep the telescoping end value near zero even
  // for long series.
  const auto values = x.values();
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  const double mean = (sum + comp) / static_cast<double>(values.size());

  std::vector<double> out(values.size());
  sum = 0.0;
  comp = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mean;
    const double t = sum + d;
    comp += std::abs(sum) >= std::abs(d) ? (sum - t) + d : (d - t) + sum;
    sum = t;
    out[i] = sum + comp;
  }
  return Series(std::move(out), SeriesKind::Profile, x.label(), x.t0_index());
}

void write_tsv(std::ostream& out, const Series& series) {
  char buf[64];
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", series[i]);
    out << (series.t0_index() + static_cast<std::int64_t>(i)) << '\t' << buf << '\n';
  }
}

Series read_tsv(std::istream& in, SeriesKind kind, std::string label) {
  std::vector<double> values;
  std::string line;
  std::size_t row = 0;
  std::int64_t t0 = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    const std::string_view view = line;
    const auto tab = view.find('\t');
    const std::string_view index_text = trim(view.substr(0, tab));
    const std::string_view value_text =
        tab == std::string_view::npos ? std::string_view{} : view.substr(tab + 1);
    double index = 0.0;
    double value = 0.0;
    const bool ok = parse_double(index_text, index) && parse_double(value_text, value);
    if (first && !ok) {  // header
      first = false;
      continue;
    }
    ++row;
    if (!ok || !std::isfinite(value)) {
      throw Error(ErrorCode::MalformedCsv,
                  "tsv row " + std::to_string(row) + " is not 'index<TAB>value'", row);
    }
    if (first) t0 = static_cast<std::int64_t>(index);
    first = false;
    values.push_back(value);
  }
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "no data rows");
  return Series(std::move(values), kind, std::move(label), t0);
}

}  // namespace fractsect
