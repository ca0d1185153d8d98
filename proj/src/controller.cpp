#include "netlqr/controller.hpp"

#include "netlqr/errors.hpp"

namespace netlqr {

Vector ActionProfile::stacked(const Dims& dims) const {
  Vector out(dims.total_u());
  out.head(dims.d_u0) = u0;
  for (int i = 0; i < dims.n_subsystems(); ++i) out.segment(dims.u_offset(i), dims.d_u[i]) = u[i];
  return out;
}

ActionProfile compute_actions(const GainSchedule& schedule, int t, const CommonEstimate& est,
                              std::span<const Vector> local_states) {
  const Dims& dims = schedule.dims;
  const int n = dims.n_subsystems();
  if (t < 0 || t > dims.horizon) throw DimensionError("compute_actions: t out of range");
  if (static_cast<int>(est.xhat.size()) != n || static_cast<int>(local_states.size()) != n) {
    throw DimensionError("compute_actions: one estimate and state per subsystem");
  }
  Vector xhat(dims.total_x());
  for (int i = 0; i < n; ++i) {
    if (est.xhat[i].size() != dims.d_x[i] || local_states[i].size() != dims.d_x[i]) {
      throw DimensionError("compute_actions: subsystem " + std::to_string(i) + " has wrong size");
    }
    xhat.segment(dims.x_offset(i), dims.d_x[i]) = est.xhat[i];
  }
  const Vector common = schedule.K[t] * xhat;

  ActionProfile a;
  a.u0 = common.head(dims.d_u0);
  a.ubar.reserve(n);
  a.u.reserve(n);
  for (int i = 0; i < n; ++i) {
    a.ubar.push_back(common.segment(dims.u_offset(i), dims.d_u[i]));
    a.u.push_back(a.ubar.back() + schedule.Ktilde[i][t] * (local_states[i] - est.xhat[i]));
  }
  return a;
}

Policy optimal_policy(const GainSchedule& schedule) {
  return [&schedule](int t, const CommonEstimate& est, std::span<const Vector> x) {
    return compute_actions(schedule, t, est, x);
  };
}

std::vector<MessageSize> message_sizes(const ModelSpec& model) {
  const Dims& dims = model.dims;
  std::vector<MessageSize> out;
  for (int i = 0; i < dims.n_subsystems(); ++i) {
    MessageSize m;
    m.scheme_a = dims.d_x[i] + dims.d_u[i];
    m.scheme_b = 1 + dims.d_u0 + dims.d_u[i];
    if (m.scheme_b < m.scheme_a) {
      m.payload = m.scheme_b;
      m.scheme = DownlinkScheme::ChannelStateAndRemoteAction;
    } else {
      m.payload = m.scheme_a;
    }
    out.push_back(m);
  }
  return out;
}

}  // namespace netlqr
