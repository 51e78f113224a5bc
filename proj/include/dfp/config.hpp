#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dfp/anova.hpp"
#include "dfp/fpca.hpp"
#include "dfp/longrun.hpp"

namespace dfp {

/// Run settings shared by the command-line entry points.  Parsed from
/// `key = value` lines; unknown keys are rejected.
struct RunConfig {
  int train_window = 52;
  int horizon = 10;
  AnovaMethod decomposition = AnovaMethod::FM;
  KRule k_rule = KRule::evr();
  LagKernel kernel = LagKernel::Bartlett;
  std::optional<double> bandwidth;  // absent means the plug-in rule
  bool clr_on = true;               // raw-scale modelling for gsy when off
  std::vector<std::string> methods{"fm"};
  std::uint64_t seed = 0;
};

RunConfig parse_run_config(std::istream& in);
RunConfig parse_run_config_file(const std::string& path);

/// Enforces the documented bounds (train_window >= 10, horizon >= 1, known
/// method names); throws std::invalid_argument describing the violation.
void validate_config(const RunConfig& config);

}  // namespace dfp
