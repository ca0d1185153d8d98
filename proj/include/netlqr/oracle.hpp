#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netlqr/controller.hpp"
#include "netlqr/synthesis.hpp"

namespace netlqr {

/// Gains of the structural form (u0, ū) = Kc[t]·X̂ and u_i = ū_i + Kd[i][t]·(x_i − X̂_i),
/// not necessarily optimal.
struct LinearPolicy {
  Dims dims;
  std::vector<Matrix> Kc;               // [t], total_u × total_x
  std::vector<std::vector<Matrix>> Kd;  // [i][t], d_u[i] × d_x[i]
};

LinearPolicy policy_from_schedule(const GainSchedule& schedule);

/// Simulation policy for a LinearPolicy (the policy is copied).
Policy to_policy(LinearPolicy policy);

/// Mean and second moment of z = (X̂_1..X̂_N, Ê_1..Ê_N) with Ê_i = X_i − X̂_i.
struct JointMoment {
  Vector m1;
  Matrix M2;
};

/// How the per-link reset mixture is averaged over the channel outcomes.
enum class ResetAggregation {
  /// One two-point mixture per link, applied link by link.
  Sequential,
  /// Explicit sum over all 2^N joint outcomes.
  Enumerated,
};

/// Moments of z at every step t = 0..T, after the step-t uplink outcome is applied.
std::vector<JointMoment> propagate_moments(const ModelSpec& model, const LinearPolicy& policy,
                                           ResetAggregation aggregation = ResetAggregation::Sequential);

/// E[c_t] for t = 0..T, computed from the propagated moments.
std::vector<double> exact_stage_costs(const ModelSpec& model, const LinearPolicy& policy,
                                      ResetAggregation aggregation = ResetAggregation::Sequential);

/// E[Σ_t c_t] without simulation.
double exact_cost(const ModelSpec& model, const LinearPolicy& policy,
                  ResetAggregation aggregation = ResetAggregation::Sequential);

struct PerturbationTrial {
  std::string kind;    // "entry" or "direction"
  std::string target;  // "Kc" or "Kd[i]"
  int t = 0;
  double delta_plus = 0.0;   // J(+ε) − J*
  double delta_minus = 0.0;  // J(−ε) − J*
  double derivative = 0.0;   // (J(+ε) − J(−ε)) / 2ε
};

struct StationarityReport {
  double optimal_cost = 0.0;
  double epsilon = 0.0;
  std::vector<PerturbationTrial> trials;
  double min_delta = 0.0;
  double max_abs_derivative = 0.0;
  bool passed = false;
};

inline constexpr double kDeltaCostFloor = -1e-10;
inline constexpr double kDerivativeRelTol = 1e-6;

/// Random single-entry and random-direction perturbations of the optimal gains.
///
/// Passes iff every Δcost ≥ −1e-10 and every central difference satisfies
/// |derivative| ≤ 1e-6·max(1, |J*|).
StationarityReport stationarity_check(const ModelSpec& model, const GainSchedule& schedule,
                                      double epsilon, int trials, std::uint64_t seed);

/// Largest |central difference| / max(1, |J|) over every gain entry at every step.
double max_relative_gradient(const ModelSpec& model, const LinearPolicy& policy, double epsilon);

}  // namespace netlqr
