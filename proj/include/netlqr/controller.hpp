#pragma once

#include <functional>
#include <span>
#include <vector>

#include "netlqr/estimator.hpp"
#include "netlqr/synthesis.hpp"

namespace netlqr {

/// Actions of every controller at one step.
struct ActionProfile {
  Vector u0;                // remote action
  std::vector<Vector> ubar; // common component of each local action
  std::vector<Vector> u;    // applied local action

  /// Stacked (u0, u_1..u_N).
  Vector stacked(const Dims& dims) const;
};

/// Decision rule evaluated at step t from the common estimate and the local states.
using Policy =
    std::function<ActionProfile(int t, const CommonEstimate& est, std::span<const Vector> x)>;

/// (u0, ū_1..ū_N) = K[t]·X̂ and u_i = ū_i + K̃_i[t]·(x_i − X̂_i).
ActionProfile compute_actions(const GainSchedule& schedule, int t, const CommonEstimate& est,
                              std::span<const Vector> local_states);

/// compute_actions bound to a schedule; `schedule` must outlive the policy.
Policy optimal_policy(const GainSchedule& schedule);

/// Scheme A sends (X̂_i, ū_i); scheme B sends (Γ_i, u0 of the previous step, ū_i)
/// and lets the local controller run the estimate recursion itself.
enum class DownlinkScheme { EstimateAndMean, ChannelStateAndRemoteAction };

struct MessageSize {
  Index scheme_a = 0;  // d_x + d_u
  Index scheme_b = 0;  // 1 + d_u0 + d_u
  Index payload = 0;
  DownlinkScheme scheme = DownlinkScheme::EstimateAndMean;
};

/// Smallest per-step downlink payload for every local controller; ties go to scheme A.
std::vector<MessageSize> message_sizes(const ModelSpec& model);

}  // namespace netlqr
