#include "fractsect/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <istream>
#include <map>
#include <set>

#include "fractsect/error.hpp"

namespace fractsect {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view why) {
  throw Error(ErrorCode::BadConfig,
              std::string(key) + " = '" + std::string(value) + "': " + std::string(why));
}

template <class T>
T parse_integer(std::string_view key, std::string_view text) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) bad(key, text, "expected an integer");
  return v;
}

double parse_real(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) bad(key, text, "expected a number");
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  bad(key, text, "expected true or false");
}

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::size_t RunConfig::resolved_ensemble_size() const {
  if (ensemble_size > 0) return ensemble_size;
  return detrend == DetrendMode::EemdGlobal ? 100 : 16;
}

std::string detrend_name(DetrendMode mode, int poly_order) {
  switch (mode) {
    case DetrendMode::EemdWindow: return "eemd-window";
    case DetrendMode::EemdGlobal: return "eemd-global";
    case DetrendMode::Poly: return "poly:" + std::to_string(poly_order);
  }
  return "unknown";
}

void RunConfig::validate() const {
  if (inputs.empty()) throw Error(ErrorCode::BadConfig, "no inputs");
  std::set<std::string> labels;
  for (const auto& in : inputs) {
    if (in.path.empty()) throw Error(ErrorCode::BadConfig, "empty input path");
    if (in.label.empty()) throw Error(ErrorCode::BadConfig, "empty label for " + in.path);
    if (!labels.insert(in.label).second) {
      throw Error(ErrorCode::BadConfig, "duplicate sector label " + in.label);
    }
  }
  if (date_column.empty() || value_column.empty()) {
    throw Error(ErrorCode::BadConfig, "column names must not be empty");
  }
  if (poly_order < 0 || poly_order > 10) throw Error(ErrorCode::BadConfig, "poly order must lie in [0, 10]");
  if (min_windows < 1) throw Error(ErrorCode::BadConfig, "min_windows must be >= 1");
  if (!(persistence_band >= 0.0 && persistence_band < 0.5)) {
    throw Error(ErrorCode::BadConfig, "persistence_band must lie in [0, 0.5)");
  }
  if (out_dir.empty()) throw Error(ErrorCode::BadConfig, "out_dir must not be empty");
  try {
    const auto params = analysis_params();
    if (detrend != DetrendMode::Poly) params.eemd.validate();
    if (detrend == DetrendMode::EemdWindow && s_min < 8) {
      throw Error(ErrorCode::BadConfig, "eemd-window needs s_min >= 8");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BadConfig) throw;
    throw Error(ErrorCode::BadConfig, e.what());
  }
}

AnalysisParams RunConfig::analysis_params() const {
  AnalysisParams p;
  p.grid = scale_grid(s_min, crossover, s_max, scales_per_regime);
  p.qs = QGrid::uniform(q_min, q_max, q_step);
  p.mode = detrend;
  p.poly_order = poly_order;
  p.eemd.ensemble_size = resolved_ensemble_size();
  p.eemd.noise_ratio = noise_ratio;
  p.eemd.master_seed = seed;
  p.eemd.sift.sd_threshold = sift_threshold;
  p.eemd.sift.max_iterations = sift_max_iterations;
  p.min_windows = min_windows;
  return p;
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["date_column"] = date_column;
  kv["value_column"] = value_column;
  kv["s_min"] = std::to_string(s_min);
  kv["crossover"] = std::to_string(crossover);
  kv["s_max"] = std::to_string(s_max);
  kv["scales_per_regime"] = std::to_string(scales_per_regime);
  kv["q_min"] = fmt_real(q_min);
  kv["q_max"] = fmt_real(q_max);
  kv["q_step"] = fmt_real(q_step);
  kv["detrend"] = detrend_name(detrend, poly_order);
  kv["ensemble_size"] = std::to_string(resolved_ensemble_size());
  kv["noise_ratio"] = fmt_real(noise_ratio);
  kv["seed"] = std::to_string(seed);
  kv["sift_threshold"] = fmt_real(sift_threshold);
  kv["sift_max_iterations"] = std::to_string(sift_max_iterations);
  kv["min_windows"] = std::to_string(min_windows);
  kv["persistence_band"] = fmt_real(persistence_band);
  kv["out_dir"] = out_dir;
  kv["emit_table"] = emit_table ? "true" : "false";
  kv["emit_json"] = emit_json ? "true" : "false";
  kv["emit_plotdata"] = emit_plotdata ? "true" : "false";
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  for (const auto& in : inputs) out += "input = " + in.path + ", " + in.label + "\n";
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunConfig::hash() const {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

InputSpec parse_input(std::string_view text) {
  text = trim(text);
  InputSpec in;
  const auto comma = text.rfind(',');
  if (comma != std::string_view::npos) {
    in.path = std::string(trim(text.substr(0, comma)));
    in.label = std::string(trim(text.substr(comma + 1)));
  } else {
    in.path = std::string(text);
    in.label = std::filesystem::path(in.path).stem().string();
  }
  return in;
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "input") {
    c.inputs.push_back(parse_input(value));
  } else if (key == "date_column") {
    c.date_column = std::string(value);
  } else if (key == "value_column") {
    c.value_column = std::string(value);
  } else if (key == "s_min") {
    c.s_min = parse_integer<std::size_t>(key, value);
  } else if (key == "crossover") {
    c.crossover = parse_integer<std::size_t>(key, value);
  } else if (key == "s_max") {
    c.s_max = parse_integer<std::size_t>(key, value);
  } else if (key == "scales_per_regime") {
    c.scales_per_regime = parse_integer<std::size_t>(key, value);
  } else if (key == "q_min") {
    c.q_min = parse_real(key, value);
  } else if (key == "q_max") {
    c.q_max = parse_real(key, value);
  } else if (key == "q_step") {
    c.q_step = parse_real(key, value);
  } else if (key == "detrend") {
    if (value == "eemd-window" || value == "eemd") {
      c.detrend = DetrendMode::EemdWindow;
    } else if (value == "eemd-global") {
      c.detrend = DetrendMode::EemdGlobal;
    } else if (value.starts_with("poly:")) {
      c.detrend = DetrendMode::Poly;
      c.poly_order = parse_integer<int>(key, value.substr(5));
    } else {
      bad(key, value, "expected eemd-window, eemd-global or poly:k");
    }
  } else if (key == "ensemble_size") {
    c.ensemble_size = parse_integer<std::size_t>(key, value);
  } else if (key == "noise_ratio") {
    c.noise_ratio = parse_real(key, value);
  } else if (key == "seed") {
    c.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "sift_threshold") {
    c.sift_threshold = parse_real(key, value);
  } else if (key == "sift_max_iterations") {
    c.sift_max_iterations = parse_integer<int>(key, value);
  } else if (key == "min_windows") {
    c.min_windows = parse_integer<std::size_t>(key, value);
  } else if (key == "persistence_band") {
    c.persistence_band = parse_real(key, value);
  } else if (key == "out_dir") {
    c.out_dir = std::string(value);
  } else if (key == "emit_table") {
    c.emit_table = parse_bool(key, value);
  } else if (key == "emit_json") {
    c.emit_json = parse_bool(key, value);
  } else if (key == "emit_plotdata") {
    c.emit_plotdata = parse_bool(key, value);
  } else {
    bad(key, value, "unknown key");
  }
}

void read_config(std::istream& in, RunConfig& config) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::BadConfig, "line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_setting(config, trim(view.substr(0, eq)), view.substr(eq + 1));
  }
}

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("FRACTSECT_SEED");
  if (raw == nullptr) return std::nullopt;
  const std::string_view text = trim(raw);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::BadConfig, "FRACTSECT_SEED must be an unsigned integer");
  }
  return v;
}

}  // namespace fractsect
