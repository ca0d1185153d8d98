#pragma once

#include <optional>
#include <vector>

#include "netlqr/model.hpp"

namespace netlqr {

/// Common estimate X̂_t shared by every controller.
struct CommonEstimate {
  std::vector<Vector> xhat;
  int t = 0;
};

/// Uplink outputs at one step: the state when the packet arrived, nothing otherwise.
struct UplinkObservation {
  std::vector<std::optional<Vector>> z;

  static UplinkObservation all_dropped(int n) { return {std::vector<std::optional<Vector>>(n)}; }
};

/// X̂_0 = μ0 on a drop, X_0 on a successful transmission.
CommonEstimate init_estimate(const NoiseSpec& noise, const UplinkObservation& z0);

/// One step of the estimate recursion.
///
/// Dropped: X̂' = A·X̂ + B_local·ū + B_remote·u0. Received: X̂' = X.
/// `ubar` holds the mean local actions per subsystem.
CommonEstimate update_estimate(const CommonEstimate& est, const std::vector<Vector>& ubar,
                               const Vector& u0, const UplinkObservation& z_next,
                               const ModelSpec& model);

}  // namespace netlqr
