#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "netlqr/simulator.hpp"
#include "netlqr/synthesis.hpp"

namespace netlqr {

/// Finite-horizon centralized LQ gains K[t] and cost-to-go P[t].
struct CentralizedGains {
  std::vector<Matrix> P;  // t = 0..T+1
  std::vector<Matrix> K;  // t = 0..T, U = K X
};

/// Standard backward recursion on the assembled (A, B, R_t).
///
/// Completes the square on the stacked quadratic form G = R_t + [A B]ᵀP[A B]
/// and eliminates the action block with an LDLT solve; it shares no code
/// with synthesize().
CentralizedGains centralized_lqr(const ModelSpec& model);

/// Simulation policy U = K[t]·X ignoring the estimate; ū is set equal to u.
Policy centralized_policy(const CentralizedGains& gains, const Dims& dims);

/// synthesize() on a copy of the model with every link always failing.
GainSchedule always_failed_gains(const ModelSpec& model);

/// Stacked deviation gain acting on (0, X_1 − X̂_1, .., X_N − X̂_N): zero block row
/// for the remote controller and block-diagonal K̃ for the local ones.
Matrix stacked_deviation_gain(const GainSchedule& schedule, int t);

struct DecoupledReport {
  int episodes = 0;
  double max_abs_diff = 0.0;
  bool passed = false;
};

/// Decoupled-form check. `remote_slices[i]` is the width of the slice of u0
/// that drives subsystem i. Each subsystem becomes its own one-local,
/// one-remote problem; the joint optimal actions on shared episodes must
/// match the per-subsystem ones to 1e-9 (relative to max(1, |u|)).
///
/// Throws StructuralError if the model is not in decoupled form.
DecoupledReport decoupled_check(const ModelSpec& model, const std::vector<Index>& remote_slices,
                                int episodes = 5, std::uint64_t seed = 0);

/// Even split of u0 across subsystems; throws StructuralError if d_u0 is not divisible by N.
DecoupledReport decoupled_check(const ModelSpec& model, int episodes = 5, std::uint64_t seed = 0);

/// Single-subsystem model i of a decoupled model.
ModelSpec decoupled_subproblem(const ModelSpec& model, const std::vector<Index>& remote_slices,
                               int i);

/// Controllers in `idle` (0 = remote, i+1 = local i) lose their influence:
/// their B block is zeroed, their R^{UU} diagonal block becomes I and every
/// cost cross term with them is zeroed.
ModelSpec no_action_embedding(const ModelSpec& model, const std::set<int>& idle);

}  // namespace netlqr
