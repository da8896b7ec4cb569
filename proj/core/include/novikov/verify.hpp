#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace novikov {

/// Test hook: scale one Helmholtz multiplier of the grid used by the
/// eigenfunction check.
struct HelmholtzFault {
  int mode = 3;
  double factor = 1.01;
};

struct VerifyOptions {
  /// Only checks whose name contains this substring run (empty: all).
  std::string filter;
  std::optional<HelmholtzFault> helmholtz_fault;
  /// Test hook: lambda used when checking the energy law, in place of the
  /// lambda the run was made with.
  std::optional<double> check_lambda;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<std::string> verify_check_names();

std::vector<CheckResult> run_verify(const VerifyOptions& opts = {});

/// Fixed-width pass/fail table with a summary line.
std::string format_table(const std::vector<CheckResult>& results);

/// Prints the table; exit 0 iff at least one check ran and all passed.
int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace novikov
