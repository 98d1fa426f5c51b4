#include <omp.h>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fractsect/config.hpp"
#include "fractsect/error.hpp"
#include "fractsect/report.hpp"
#include "fractsect/synth.hpp"
#include "fractsect/validation.hpp"

using namespace fractsect;

namespace {

struct FlagBinding {
  const char* flag;
  const char* key;
  const char* help;
  std::string value;
};

int write_series(const Series& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "fractsect: cannot write " << path << "\n";
    return 1;
  }
  write_tsv(out, s);
  out.flush();
  if (!out) {
    std::cerr << "fractsect: write failed for " << path << "\n";
    return 1;
  }
  std::cerr << "wrote " << s.size() << " values to " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sector-wise multifractal analysis with EEMD-detrended MFDFA"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (default: all)")->check(CLI::NonNegativeNumber);

  std::uint64_t default_seed = kDefaultSeed;
  try {
    if (auto env = seed_from_env()) default_seed = *env;
  } catch (const Error& e) {
    std::cerr << "fractsect: " << e.what() << "\n";
    return 2;
  }

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Analyse price CSVs or return TSVs");
  std::string config_path;
  std::vector<std::string> inputs;
  std::vector<FlagBinding> bindings = {
      {"--date-column", "date_column", "CSV date column", {}},
      {"--value-column", "value_column", "CSV price column", {}},
      {"--s-min", "s_min", "smallest scale", {}},
      {"--crossover", "crossover", "first scale of the long regime", {}},
      {"--s-max", "s_max", "largest scale", {}},
      {"--scales-per-regime", "scales_per_regime", "log-spaced scales per regime", {}},
      {"--q-min", "q_min", "smallest q", {}},
      {"--q-max", "q_max", "largest q", {}},
      {"--q-step", "q_step", "q spacing", {}},
      {"--detrend", "detrend", "eemd-window | eemd-global | poly:k", {}},
      {"--ensemble-size", "ensemble_size", "EEMD ensemble size M", {}},
      {"--noise-ratio", "noise_ratio", "EEMD noise std in units of the signal std", {}},
      {"--seed", "seed", "master seed", {}},
      {"--sift-threshold", "sift_threshold", "sifting SD stop threshold", {}},
      {"--sift-max-iterations", "sift_max_iterations", "sifting iteration cap", {}},
      {"--min-windows", "min_windows", "minimum windows per scale", {}},
      {"--band", "persistence_band", "H2 band around 0.5 for the boundary class", {}},
      {"--out", "out_dir", "output directory", {}},
      {"--emit-table", "emit_table", "write report.txt", {}},
      {"--emit-json", "emit_json", "write report.json", {}},
      {"--emit-plotdata", "emit_plotdata", "write plot TSVs", {}},
  };
  analyze_cmd->add_option("--config", config_path, "flat key = value config file");
  for (auto& b : bindings) analyze_cmd->add_option(b.flag, b.value, b.help);
  analyze_cmd->add_option("inputs", inputs, "input files (.csv prices or .tsv returns)");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic series");
  synth_cmd->require_subcommand(1);
  std::string synth_out;
  std::uint64_t synth_seed = default_seed;

  CascadeSpec cascade_spec;
  auto* cascade_cmd = synth_cmd->add_subcommand("cascade", "deterministic binomial cascade");
  cascade_cmd->add_option("--levels", cascade_spec.levels, "length is 2^levels");
  cascade_cmd->add_option("--a", cascade_spec.a, "multiplier in (0.5, 1)");
  cascade_cmd->add_option("--out", synth_out, "output TSV (default <kind>.tsv)");
  cascade_cmd->add_option("--seed", synth_seed, "seed (unused by the cascade)");

  FgnSpec fgn_spec;
  auto* fgn_cmd = synth_cmd->add_subcommand("fgn", "fractional Gaussian noise");
  fgn_cmd->add_option("--n", fgn_spec.length, "length");
  fgn_cmd->add_option("--hurst", fgn_spec.hurst, "Hurst exponent in (0, 1)");
  fgn_cmd->add_option("--out", synth_out, "output TSV (default <kind>.tsv)");
  fgn_cmd->add_option("--seed", synth_seed, "seed");

  std::string shuffle_in;
  auto* shuffle_cmd = synth_cmd->add_subcommand("shuffle", "random permutation of a TSV series");
  shuffle_cmd->add_option("--in", shuffle_in, "input TSV")->required();
  shuffle_cmd->add_option("--out", synth_out, "output TSV (default <kind>.tsv)");
  shuffle_cmd->add_option("--seed", synth_seed, "seed");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Run the built-in oracle suite");
  ValidationOptions vopts;
  vopts.seed = default_seed;
  std::string validate_out;
  validate_cmd->add_flag("--quick", vopts.quick, "shorter inputs, bands x1.5");
  validate_cmd->add_option("--seed", vopts.seed, "master seed");
  validate_cmd->add_option("--out", validate_out, "also write the table to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (threads > 0) omp_set_num_threads(threads);

  if (analyze_cmd->parsed()) {
    RunConfig config;
    config.seed = default_seed;
    try {
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw Error(ErrorCode::BadConfig, "cannot read config " + config_path);
        read_config(in, config);
      }
      for (const auto& b : bindings) {
        if (analyze_cmd->count(b.flag) > 0) apply_setting(config, b.key, b.value);
      }
      for (const auto& in : inputs) config.inputs.push_back(parse_input(in));
    } catch (const Error& e) {
      std::cerr << "fractsect: " << e.what() << "\n";
      return 2;
    }
    return cmd_analyze(config, std::cerr);
  }

  if (synth_cmd->parsed()) {
    try {
      if (cascade_cmd->parsed()) {
        cascade_spec.seed = synth_seed;
        return write_series(binomial_cascade(cascade_spec), synth_out.empty() ? "cascade.tsv" : synth_out);
      }
      if (fgn_cmd->parsed()) {
        fgn_spec.seed = synth_seed;
        return write_series(fgn(fgn_spec), synth_out.empty() ? "fgn.tsv" : synth_out);
      }
      std::ifstream in(shuffle_in, std::ios::binary);
      if (!in) {
        std::cerr << "fractsect: cannot open " << shuffle_in << "\n";
        return 1;
      }
      const Series x = read_tsv(in, SeriesKind::Synthetic, shuffle_in);
      return write_series(shuffle(x, synth_seed), synth_out.empty() ? "shuffle.tsv" : synth_out);
    } catch (const Error& e) {
      std::cerr << "fractsect: " << e.what() << "\n";
      return e.code() == ErrorCode::BadSpec ? 2 : 1;
    }
  }

  if (validate_cmd->parsed()) {
    const auto results = run_validation(vopts, &std::cerr);
    const std::string table = format_validation(results, vopts);
    std::cout << table << std::flush;
    if (!validate_out.empty()) {
      std::ofstream out(validate_out, std::ios::binary | std::ios::trunc);
      out << table;
      if (!out) {
        std::cerr << "fractsect: cannot write " << validate_out << "\n";
        return 1;
      }
    }
    for (const auto& r : results) {
      if (!r.pass) {
        std::cerr << "failed: criterion " << r.id << " (" << r.name << ")\n";
      }
    }
    for (const auto& r : results) {
      if (!r.pass) return 1;
    }
    return 0;
  }
  return 2;
}
