#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fundgrowth {

struct CheckResult {
  std::string name;
  std::size_t instances = 0;
  double max_violation = 0.0;  ///< worst normalised violation over the sweep
  double tolerance = 0.0;
  bool report_only = false;    ///< informational sweep, never fails
  std::string note;

  bool passed() const { return report_only || max_violation <= tolerance; }
};

struct VerifyOptions {
  std::vector<std::string> checks;      ///< empty runs every check
  std::optional<std::size_t> instances; ///< overrides each check's default count
  std::uint64_t seed = 0;
  std::optional<std::string> sabotage;  ///< check to perturb deliberately
};

/// Registered check names in execution order.
std::vector<std::string> check_names();

/// Check `i` in registration order draws from derive_seed(seed, i). Throws ConfigError for
/// an unknown check or sabotage name.
std::vector<CheckResult> run_checks(const VerifyOptions& options);

void print_check_table(const std::vector<CheckResult>& results, std::ostream& out);

}  // namespace fundgrowth
