#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fractsect {

enum class SeriesKind { Prices, LogReturns, Profile, Synthetic };

std::string_view to_string(SeriesKind kind);

/// A uniformly sampled scalar time series.
///
/// The constructor enforces the invariants shared by every kind: all values
/// finite, at least two samples for prices (one otherwise), and strictly
/// positive prices. A Series is immutable once built.
class Series {
 public:
  Series(std::vector<double> values, SeriesKind kind, std::string label = {},
         std::int64_t t0_index = 0);

  std::span<const double> values() const noexcept { return values_; }
  SeriesKind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }
  std::int64_t t0_index() const noexcept { return t0_index_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
  SeriesKind kind_;
  std::string label_;
  std::int64_t t0_index_;
};

struct SectorMeta {
  std::string symbol;
  std::string name;
  int stock_count = 1;

  void validate() const;
};

// The 22 S&P BSE sector indices with full coverage from 2017-01-02 to
// 2022-06-30, used to label reports when an input's label matches a symbol.
const std::vector<SectorMeta>& bse_sectors();
const SectorMeta* find_bse_sector(std::string_view symbol);

/// Reads a price column from CSV text with a header row.
///
/// Rows are kept in file order; dates are metadata only, so gaps and
/// duplicates pass through untouched. Row numbers in errors are 1-based over
/// data rows (the header is not counted).
Series load_series(std::istream& source, std::string_view date_column,
                   std::string_view value_column, std::string label);

// out[t] = ln(p[t + lag]) - ln(p[t])
Series log_returns(const Series& prices, std::size_t lag = 1);

// Cumulative sum of deviations from the full-series mean.
Series profile(const Series& x);

// Two-column `index<TAB>value` text, values with 17 significant digits.
void write_tsv(std::ostream& out, const Series& series);
// Accepts the output of write_tsv; a non-numeric first line is treated as a
// header and skipped.
Series read_tsv(std::istream& in, SeriesKind kind, std::string label);

}  // namespace fractsect
