// The release gate: nine fixed criteria, each a desk-scale reproduction of a
// guarantee (20 seeds, frozen schedules and tolerances) or a property sweep.
// Shared by the acceptance test binary and the CLI verify subcommand.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rgossip {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // measured values vs bounds, counts per seed
  double seconds = 0.0;
};

const std::vector<int>& acceptance_ids();
std::string acceptance_name(int id);

// Runs one criterion. progress, when given, receives one line per seed or
// sub-check as work completes; results are independent of it.
CriterionResult run_acceptance_criterion(int id, std::ostream* progress = nullptr);

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids,
                                            std::ostream* progress = nullptr);

// "[PASS] A2 <name>: <detail> [12.3 s]"
std::string format_criterion_result(const CriterionResult& r);

} // namespace rgossip
