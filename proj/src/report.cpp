#include "fractsect/report.hpp"

#include <cctype>
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fractsect/error.hpp"
#include "json.hpp"

namespace fractsect {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool ends_with_ci(const std::string& s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  for (std::size_t i = 0; i < suffix.size(); ++i) {
    const char c = s[s.size() - suffix.size() + i];
    if (std::tolower(static_cast<unsigned char>(c)) != suffix[i]) return false;
  }
  return true;
}

Series load_input(const InputSpec& input, const RunConfig& config) {
  std::ifstream in(input.path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + input.path);
  if (ends_with_ci(input.path, ".tsv")) {
    return read_tsv(in, SeriesKind::LogReturns, input.label);
  }
  const Series prices = load_series(in, config.date_column, config.value_column, input.label);
  return log_returns(prices);
}

RegimeReport regime_report(const HurstCurve& curve, double band) {
  return RegimeReport{curve.regime, curve, spectrum_report(curve, band)};
}

// Keeps artifact names inside out_dir whatever the label holds.
std::string file_stem(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!keep) c = '_';
  }
  if (out.empty() || out[0] == '.') out.insert(out.begin(), '_');
  return out;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json regime_json(const RegimeReport& r) {
  json hurst = json::array();
  for (const auto& p : r.curve.points) {
    hurst.push_back({{"q", p.q},
                     {"H", number(p.h)},
                     {"stderr", number(p.std_error)},
                     {"r2", number(p.r2)},
                     {"n_scales", p.n_scales}});
  }
  json tau = json::array();
  for (const auto& t : r.spectrum.tau) tau.push_back({{"q", t.q}, {"tau", number(t.tau)}});
  json spectrum = json::array();
  for (const auto& p : r.spectrum.spectrum) {
    spectrum.push_back(
        {{"q", p.q}, {"alpha", number(p.alpha)}, {"f", number(p.f)}, {"one_sided", p.one_sided}});
  }
  const auto& s = r.spectrum;
  return {{"hurst", std::move(hurst)},
          {"tau", std::move(tau)},
          {"spectrum", std::move(spectrum)},
          {"delta_alpha", number(s.delta_alpha)},
          {"alpha_max", number(s.alpha_max)},
          {"alpha_0", number(s.alpha_0)},
          {"alpha_min", number(s.alpha_min)},
          {"delta_alpha_L", number(s.delta_alpha_L)},
          {"delta_alpha_R", number(s.delta_alpha_R)},
          {"B", number(s.B)},
          {"dH", number(s.dH)},
          {"H2", number(s.H2)},
          {"persistence", std::string(to_string(s.persistence))}};
}

json config_json(const RunConfig& c) {
  json inputs = json::array();
  for (const auto& in : c.inputs) inputs.push_back({{"path", in.path}, {"label", in.label}});
  return {{"inputs", std::move(inputs)},
          {"date_column", c.date_column},
          {"value_column", c.value_column},
          {"s_min", c.s_min},
          {"crossover", c.crossover},
          {"s_max", c.s_max},
          {"scales_per_regime", c.scales_per_regime},
          {"q_min", c.q_min},
          {"q_max", c.q_max},
          {"q_step", c.q_step},
          {"detrend", detrend_name(c.detrend, c.poly_order)},
          {"ensemble_size", c.resolved_ensemble_size()},
          {"noise_ratio", c.noise_ratio},
          {"seed", c.seed},
          {"sift_threshold", c.sift_threshold},
          {"sift_max_iterations", c.sift_max_iterations},
          {"min_windows", c.min_windows},
          {"persistence_band", c.persistence_band},
          {"out_dir", c.out_dir},
          {"emit_table", c.emit_table},
          {"emit_json", c.emit_json},
          {"emit_plotdata", c.emit_plotdata}};
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string hash_line(const RunConfig& config) { return "# config_hash " + config.hash() + "\n"; }

std::string fq_tsv(const RunConfig& config, const SectorReport& s) {
  std::ostringstream out;
  out << hash_line(config);
  write_surface_tsv(out, s.surface);
  return out.str();
}

std::string hq_tsv(const RunConfig& config, const SectorReport& s) {
  std::vector<HurstCurve> curves;
  for (Regime r : {Regime::Short, Regime::Long}) {
    if (s.regime(r)) curves.push_back(s.regime(r)->curve);
  }
  std::ostringstream out;
  out << hash_line(config);
  write_hurst_tsv(out, curves);
  return out.str();
}

std::string tau_tsv(const RunConfig& config, const SectorReport& s) {
  std::string out = hash_line(config) + "q\ttau\tregime\n";
  char buf[96];
  for (Regime r : {Regime::Short, Regime::Long}) {
    if (!s.regime(r)) continue;
    for (const auto& t : s.regime(r)->spectrum.tau) {
      std::snprintf(buf, sizeof(buf), "%g\t%.17g\t%s\n", t.q, t.tau,
                    std::string(to_string(r)).c_str());
      out += buf;
    }
  }
  return out;
}

std::string falpha_tsv(const RunConfig& config, const SectorReport& s) {
  std::string out = hash_line(config) + "alpha\tf\tq\tregime\n";
  char buf[128];
  for (Regime r : {Regime::Short, Regime::Long}) {
    if (!s.regime(r)) continue;
    for (const auto& p : s.regime(r)->spectrum.spectrum) {
      std::snprintf(buf, sizeof(buf), "%.17g\t%.17g\t%g\t%s\n", p.alpha, p.f, p.q,
                    std::string(to_string(r)).c_str());
      out += buf;
    }
  }
  return out;
}

}  // namespace

SectorReport analyze_sector(const InputSpec& input, const RunConfig& config) {
  SectorReport report;
  report.input = input;
  if (const SectorMeta* meta = find_bse_sector(input.label)) {
    report.meta = *meta;
  } else {
    report.meta = SectorMeta{input.label, input.label, 1};
  }
  try {
    const Series returns = load_input(input, config);
    report.n_returns = returns.size();
    auto result = analyze(returns, config.analysis_params());
    report.surface = std::move(result.surface);
    report.warnings = std::move(result.warnings);
    const auto add = [&](const std::optional<HurstCurve>& curve, std::optional<RegimeReport>& slot) {
      if (!curve) return;
      try {
        slot = regime_report(*curve, config.persistence_band);
      } catch (const Error& e) {
        report.warnings.push_back(std::string(to_string(curve->regime)) + " regime: " + e.what());
      }
    };
    add(result.short_curve, report.short_regime);
    add(result.long_curve, report.long_regime);
    report.ok = report.short_regime || report.long_regime;
    if (!report.ok) report.error = "no regime could be fitted";
  } catch (const std::exception& e) {
    report.ok = false;
    report.error = e.what();
  }
  return report;
}

RunSummary run_analysis(const RunConfig& config, std::ostream* progress) {
  const std::size_t n = config.inputs.size();
  RunSummary summary;
  summary.sectors.resize(n);
  std::size_t done = 0;
  // One sector per thread when there are several; a lone sector keeps the
  // threads for its own windows.
#pragma omp parallel for schedule(dynamic, 1) if (n > 1)
  for (std::size_t i = 0; i < n; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    summary.sectors[i] = analyze_sector(config.inputs[i], config);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
#pragma omp critical(fractsect_progress)
    {
      ++done;
      if (progress != nullptr) {
        const auto& s = summary.sectors[i];
        char buf[64];
        std::snprintf(buf, sizeof(buf), "[%zu/%zu] ", done, n);
        *progress << buf << s.input.label << ": "
                  << (s.ok ? "ok" : "failed (" + s.error + ")");
        std::snprintf(buf, sizeof(buf), " %.1fs\n", secs);
        *progress << buf << std::flush;
      }
    }
  }
  for (const auto& s : summary.sectors) summary.succeeded += s.ok ? 1 : 0;
  return summary;
}

std::string report_table(const RunConfig& config, const RunSummary& summary, Regime regime) {
  std::string out = hash_line(config);
  out += "# regime " + std::string(to_string(regime)) + "\n";
  out += table_header() + "\n";
  for (const auto& s : summary.sectors) {
    if (!s.ok || !s.regime(regime)) continue;
    out += table_row(s.input.label, s.regime(regime)->spectrum) + "\n";
  }
  return out;
}

std::string report_json(const RunConfig& config, const RunSummary& summary) {
  json sectors = json::array();
  json warnings = json::array();
  for (const auto& s : summary.sectors) {
    json regimes = json::object();
    for (Regime r : {Regime::Short, Regime::Long}) {
      if (s.regime(r)) regimes[std::string(to_string(r))] = regime_json(*s.regime(r));
    }
    json sector = {{"label", s.input.label},
                   {"input", s.input.path},
                   {"symbol", s.meta.symbol},
                   {"name", s.meta.name},
                   {"stock_count", s.meta.stock_count},
                   {"status", s.ok ? "ok" : "failed"},
                   {"n_returns", s.n_returns},
                   {"warnings", s.warnings},
                   {"regimes", std::move(regimes)},
                   {"scales", s.surface.scales},
                   {"window_count", s.surface.window_count},
                   {"zero_windows", s.surface.zero_windows}};
    if (!s.ok) {
      sector["error"] = s.error;
      warnings.push_back(s.input.label + ": " + s.error);
    }
    for (const auto& w : s.warnings) warnings.push_back(s.input.label + ": " + w);
    sectors.push_back(std::move(sector));
  }
  const json doc = {{"config", config_json(config)},
                    {"config_hash", config.hash()},
                    {"sectors", std::move(sectors)},
                    {"succeeded", summary.succeeded},
                    {"failed", summary.sectors.size() - summary.succeeded},
                    {"warnings", std::move(warnings)}};
  return doc.dump(2) + "\n";
}

void write_artifacts(const RunConfig& config, const RunSummary& summary) {
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  if (config.emit_table) {
    write_file(dir / "report.txt", report_table(config, summary, Regime::Long));
    write_file(dir / "report_short.txt", report_table(config, summary, Regime::Short));
  }
  if (config.emit_json) write_file(dir / "report.json", report_json(config, summary));
  if (config.emit_plotdata) {
    for (const auto& s : summary.sectors) {
      if (!s.ok) continue;
      const std::string stem = file_stem(s.input.label);
      write_file(dir / (stem + ".fq.tsv"), fq_tsv(config, s));
      write_file(dir / (stem + ".hq.tsv"), hq_tsv(config, s));
      write_file(dir / (stem + ".tau.tsv"), tau_tsv(config, s));
      write_file(dir / (stem + ".falpha.tsv"), falpha_tsv(config, s));
    }
  }
}

int cmd_analyze(const RunConfig& config, std::ostream& log) {
  try {
    config.validate();
  } catch (const Error& e) {
    log << "fractsect: " << e.what() << "\n";
    return 2;
  }
  log << "config " << config.hash() << ": " << config.inputs.size() << " input(s), detrend "
      << detrend_name(config.detrend, config.poly_order) << "\n";
  const RunSummary summary = run_analysis(config, &log);
  for (const auto& s : summary.sectors) {
    for (const auto& w : s.warnings) log << "warning: " << s.input.label << ": " << w << "\n";
  }
  try {
    write_artifacts(config, summary);
  } catch (const Error& e) {
    log << "fractsect: " << e.what() << "\n";
    return 1;
  }
  log << summary.succeeded << "/" << summary.sectors.size() << " sectors analysed, output in "
      << config.out_dir << "\n";
  return summary.succeeded > 0 ? 0 : 1;
}

}  // namespace fractsect
