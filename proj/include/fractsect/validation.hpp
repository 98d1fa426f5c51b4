#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fractsect/rng.hpp"

namespace fractsect {

struct ValidationOptions {
  // Shorter series, smaller ensembles and bands widened by kQuickBandFactor
  // for the criteria whose inputs shrink (1-5).
  bool quick = false;
  std::uint64_t seed = kDefaultSeed;
};

constexpr double kQuickBandFactor = 1.5;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string measured;
  std::string band;
  // Extra lines (per-q or per-row breakdown, informational checks).
  std::vector<std::string> details;
};

// Runs criteria 1-10 in order. Timings go to `progress` only, so the
// formatted results are identical between runs with the same options.
std::vector<CriterionResult> run_validation(const ValidationOptions& options,
                                            std::ostream* progress);

// One "PASS"/"FAIL" line per criterion followed by its indented details.
std::string format_validation(const std::vector<CriterionResult>& results,
                              const ValidationOptions& options);

}  // namespace fractsect
