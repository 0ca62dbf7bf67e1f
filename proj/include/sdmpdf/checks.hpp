#pragma once

#include <string>
#include <vector>

#include "nlohmann/json.hpp"

namespace sdmpdf {

struct CheckResult {
  std::string name;
  bool pass = false;
  double tolerance = 0.0;
  double measured = 0.0;
  std::string note;
};

// Property suite behind `sdmpdf check`: orthonormality, structure-coefficient
// oracles, trace/positivity conservation along the closed flow, the energy
// dissipation bound, entropy monotonicity, cross-solver agreement, and the
// stationarity of the invariant density.  `mutated_drift` flips the sign of
// the drift term fed to the generator (the potential is negated there while
// the reference density keeps the original), which must break the
// stationarity check — a sensitivity probe for the test itself.
std::vector<CheckResult> run_check_suite(bool mutated_drift);

nlohmann::json check_report_json(const std::vector<CheckResult>& results);

// Prints one line per check; writes JSON if out_path is nonempty.
// Returns 0 iff all checks pass.
int cmd_check(bool mutated_drift, const std::string& out_path);

}  // namespace sdmpdf
