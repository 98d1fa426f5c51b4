#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fractsect/config.hpp"
#include "fractsect/mfdfa.hpp"
#include "fractsect/series.hpp"
#include "fractsect/spectrum.hpp"

namespace fractsect {

struct RegimeReport {
  Regime regime = Regime::Long;
  HurstCurve curve;
  SpectrumReport spectrum;
};

struct SectorReport {
  InputSpec input;
  SectorMeta meta;
  bool ok = false;
  std::string error;  // set when !ok
  std::size_t n_returns = 0;
  FluctuationSurface surface;
  std::optional<RegimeReport> short_regime;
  std::optional<RegimeReport> long_regime;
  std::vector<std::string> warnings;

  const std::optional<RegimeReport>& regime(Regime r) const {
    return r == Regime::Short ? short_regime : long_regime;
  }
};

struct RunSummary {
  std::vector<SectorReport> sectors;  // input order
  std::size_t succeeded = 0;
};

// Loads one input (.csv prices, .tsv returns) and runs the full pipeline.
// Never throws for data problems; they end up in error / warnings.
SectorReport analyze_sector(const InputSpec& input, const RunConfig& config);

// All sectors, in parallel across inputs. Progress lines go to `progress`.
RunSummary run_analysis(const RunConfig& config, std::ostream* progress);

// Sector table text for one regime: a hash comment, the header and one row
// per sector that produced that regime.
std::string report_table(const RunConfig& config, const RunSummary& summary, Regime regime);

// Canonical JSON text (sorted keys, two-space indent, trailing newline).
std::string report_json(const RunConfig& config, const RunSummary& summary);

// report.txt, report_short.txt, report.json and the per-sector plot TSVs,
// as selected by the emit flags. Throws Error(Io).
void write_artifacts(const RunConfig& config, const RunSummary& summary);

// 0: at least one sector analysed; 1: none; 2: invalid configuration.
int cmd_analyze(const RunConfig& config, std::ostream& log);

}  // namespace fractsect
