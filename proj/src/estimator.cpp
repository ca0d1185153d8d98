#include "netlqr/estimator.hpp"

#include "netlqr/errors.hpp"

namespace netlqr {

CommonEstimate init_estimate(const NoiseSpec& noise, const UplinkObservation& z0) {
  const std::size_t n = noise.mu0.size();
  if (z0.z.size() != n) throw DimensionError("init_estimate: one observation per subsystem");
  CommonEstimate est;
  est.t = 0;
  est.xhat.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (z0.z[i]) {
      if (z0.z[i]->size() != noise.mu0[i].size()) {
        throw DimensionError("init_estimate: payload " + std::to_string(i) + " has wrong length");
      }
      est.xhat.push_back(*z0.z[i]);
    } else {
      est.xhat.push_back(noise.mu0[i]);
    }
  }
  return est;
}

CommonEstimate update_estimate(const CommonEstimate& est, const std::vector<Vector>& ubar,
                               const Vector& u0, const UplinkObservation& z_next,
                               const ModelSpec& model) {
  const Dims& dims = model.dims;
  const int n = dims.n_subsystems();
  if (est.t >= dims.horizon) throw DimensionError("update_estimate: already at the horizon");
  if (static_cast<int>(est.xhat.size()) != n || static_cast<int>(ubar.size()) != n ||
      static_cast<int>(z_next.z.size()) != n || u0.size() != dims.d_u0) {
    throw DimensionError("update_estimate: argument sizes do not match the model");
  }
  CommonEstimate next;
  next.t = est.t + 1;
  next.xhat.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (z_next.z[i]) {
      if (z_next.z[i]->size() != dims.d_x[i]) {
        throw DimensionError("update_estimate: payload " + std::to_string(i) + " has wrong length");
      }
      next.xhat.push_back(*z_next.z[i]);
      continue;
    }
    if (est.xhat[i].size() != dims.d_x[i] || ubar[i].size() != dims.d_u[i]) {
      throw DimensionError("update_estimate: subsystem " + std::to_string(i) + " has wrong sizes");
    }
    const auto& pl = model.plants[i];
    next.xhat.push_back(pl.A * est.xhat[i] + pl.B_local * ubar[i] + pl.B_remote * u0);
  }
  return next;
}

}  // namespace netlqr
