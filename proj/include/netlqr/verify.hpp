#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netlqr/json_util.hpp"
#include "netlqr/model.hpp"

namespace netlqr {

struct VerifyOptions {
  int stationarity_trials = 40;
  double epsilon = 1e-3;
  std::uint64_t seed = 0;
  std::uint64_t mc_episodes = 0;  // 0 skips the Monte Carlo check
  int trace_episodes = 5;
  /// Test hook: corrupt K[0](0,0) before the checks that consume the schedule.
  bool inject_gain_error = false;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double metric = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::string label;
  std::vector<CheckResult> checks;
  bool passed = false;

  Json to_json() const;
};

/// Runs the optimality and reduction checks on one admissible model.
///
/// Checks: psd_invariants, centralized_reduction, noise_independence,
/// value_oracle_identity, oracle_factorization (N <= 3), stationarity,
/// always_failed_structure, trace_invariants and, when mc_episodes > 0,
/// monte_carlo_consistency.
VerifyReport verify_model(const ModelSpec& model, const VerifyOptions& options,
                          const std::string& label = "model");

}  // namespace netlqr
