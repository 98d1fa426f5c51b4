#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fractsect/mfdfa.hpp"
#include "fractsect/rng.hpp"

namespace fractsect {

struct InputSpec {
  std::string path;
  std::string label;  // file stem unless given explicitly
};

/// Everything that determines the output of one `analyze` run.
///
/// Config files are flat `key = value` text with `#` comments; keys are the
/// field names below, `input` may repeat (`input = path` or
/// `input = path, LABEL`).
struct RunConfig {
  std::vector<InputSpec> inputs;
  std::string date_column = "Date";
  std::string value_column = "Close";

  std::size_t s_min = 10;
  std::size_t crossover = 200;
  std::size_t s_max = 1000;
  std::size_t scales_per_regime = 20;

  double q_min = -10.0;
  double q_max = 10.0;
  double q_step = 0.5;

  DetrendMode detrend = DetrendMode::EemdWindow;
  int poly_order = 2;
  // 0 picks the mode default: 16 per window, 100 for a single global EEMD.
  std::size_t ensemble_size = 0;
  double noise_ratio = 0.2;
  std::uint64_t seed = kDefaultSeed;
  double sift_threshold = 1e-4;
  int sift_max_iterations = 64;

  std::size_t min_windows = 16;
  double persistence_band = 0.02;

  std::string out_dir = "fractsect_out";
  bool emit_table = true;
  bool emit_json = true;
  bool emit_plotdata = true;

  std::size_t resolved_ensemble_size() const;

  // Throws Error(BadConfig) on the first violated precondition.
  void validate() const;

  AnalysisParams analysis_params() const;

  // Sorted key=value lines with every field resolved; inputs last.
  std::string canonical() const;
  // 16 hex digits of FNV-1a over canonical().
  std::string hash() const;
};

std::string detrend_name(DetrendMode mode, int poly_order);

// Sets one field from its textual form. Unknown keys and unparsable values
// throw Error(BadConfig).
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

// Applies every `key = value` line of a config file on top of `config`.
void read_config(std::istream& in, RunConfig& config);

InputSpec parse_input(std::string_view text);

// FRACTSECT_SEED when set; a non-numeric value throws Error(BadConfig).
std::optional<std::uint64_t> seed_from_env();

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace fractsect
