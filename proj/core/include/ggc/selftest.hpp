#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ggc/report.hpp"

namespace ggc {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  bool report_only = false;  // measured, not asserted
  std::string detail;
  double seconds = 0.0;
};

/// The acceptance battery: ten criteria with pinned tolerances. `jobs`
/// parallelizes independent trials; results are deterministic in the seed.
std::vector<CriterionResult> run_selftest(std::uint64_t seed, int jobs = 1);

JsonNode selftest_to_json(const std::vector<CriterionResult>& results,
                          std::uint64_t seed);

}  // namespace ggc
