#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace arpid::verify {

struct VerifyOptions {
  std::uint64_t master_seed = 20250101;
  // Samples per distributional check.
  long samples = 200'000;
  // Forwarded to the rejection sampler's acceptance test. Only the mutation
  // smoke test sets this; any nonzero value should make the suite fail.
  double acceptance_slack = 0.0;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs every enumeration and sampling check and returns one result per check,
/// in a fixed order. Deterministic in options.master_seed.
std::vector<CheckResult> run_checks(const VerifyOptions& opts);

/// Prints the pass/fail table. Returns true iff every check passed.
bool print_report(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace arpid::verify
