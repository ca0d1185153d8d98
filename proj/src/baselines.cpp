#include "netlqr/baselines.hpp"

#include <Eigen/Cholesky>

#include <cmath>

#include "netlqr/errors.hpp"

namespace netlqr {

CentralizedGains centralized_lqr(const ModelSpec& model) {
  const GlobalDynamics g = assemble_global(model);
  const Index nx = g.A.rows();
  const Index nu = g.B.cols();
  const int T = model.horizon();

  Matrix dyn(nx, nx + nu);  // [A B]
  dyn << g.A, g.B;

  CentralizedGains out;
  out.P.assign(T + 2, Matrix::Zero(nx, nx));
  out.K.assign(T + 1, Matrix());
  for (int t = T; t >= 0; --t) {
    const Matrix G = model.cost(t) + dyn.transpose() * out.P[t + 1] * dyn;
    const Matrix Guu = G.bottomRightCorner(nu, nu);
    const Matrix Gux = G.bottomLeftCorner(nu, nx);
    Eigen::LDLT<Matrix> ldlt(Guu);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw SingularityError("centralized_lqr: t=" + std::to_string(t) + " action block not PD");
    }
    out.K[t] = -ldlt.solve(Gux);
    const Matrix P = G.topLeftCorner(nx, nx) + Gux.transpose() * out.K[t];
    out.P[t] = 0.5 * (P + P.transpose());
  }
  return out;
}

Policy centralized_policy(const CentralizedGains& gains, const Dims& dims) {
  return [&gains, dims](int t, const CommonEstimate&, std::span<const Vector> x) {
    Vector state(dims.total_x());
    for (int i = 0; i < dims.n_subsystems(); ++i) state.segment(dims.x_offset(i), dims.d_x[i]) = x[i];
    const Vector u = gains.K[t] * state;
    ActionProfile a;
    a.u0 = u.head(dims.d_u0);
    for (int i = 0; i < dims.n_subsystems(); ++i) {
      a.u.push_back(u.segment(dims.u_offset(i), dims.d_u[i]));
      a.ubar.push_back(a.u.back());
    }
    return a;
  };
}

GainSchedule always_failed_gains(const ModelSpec& model) {
  ModelSpec failed = model;
  failed.channel.p.assign(model.n_subsystems(), 1.0);
  return synthesize(failed);
}

Matrix stacked_deviation_gain(const GainSchedule& schedule, int t) {
  const Dims& dims = schedule.dims;
  Matrix out = Matrix::Zero(dims.total_u(), dims.total_x());
  for (int i = 0; i < dims.n_subsystems(); ++i) {
    out.block(dims.u_offset(i), dims.x_offset(i), dims.d_u[i], dims.d_x[i]) = schedule.Ktilde[i][t];
  }
  return out;
}

namespace {

// Index ranges of the stacked cost vector (x, u0, u_1..u_N) owned by subsystem i.
std::vector<Index> owned_coordinates(const Dims& dims, const std::vector<Index>& slices, int i) {
  std::vector<Index> idx;
  const Index nx = dims.total_x();
  for (Index k = 0; k < dims.d_x[i]; ++k) idx.push_back(dims.x_offset(i) + k);
  Index slice_off = 0;
  for (int j = 0; j < i; ++j) slice_off += slices[j];
  for (Index k = 0; k < slices[i]; ++k) idx.push_back(nx + slice_off + k);
  for (Index k = 0; k < dims.d_u[i]; ++k) idx.push_back(nx + dims.u_offset(i) + k);
  return idx;
}

void require_decoupled(const ModelSpec& model, const std::vector<Index>& slices) {
  const Dims& dims = model.dims;
  const int n = dims.n_subsystems();
  if (static_cast<int>(slices.size()) != n) {
    throw StructuralError("decoupled_check: one remote slice per subsystem");
  }
  Index total = 0;
  for (Index s : slices) {
    if (s < 1) throw StructuralError("decoupled_check: remote slices must be non-empty");
    total += s;
  }
  if (total != dims.d_u0) throw StructuralError("decoupled_check: slices must cover u0 exactly");

  Index slice_off = 0;
  for (int i = 0; i < n; ++i) {
    const Matrix& b0 = model.plants[i].B_remote;
    for (Index c = 0; c < dims.d_u0; ++c) {
      const bool own = c >= slice_off && c < slice_off + slices[i];
      if (!own && !b0.col(c).isZero(0.0)) {
        throw StructuralError("decoupled_check: plant " + std::to_string(i) +
                              " is driven by another subsystem's remote slice");
      }
    }
    slice_off += slices[i];
  }

  std::vector<int> owner(dims.total_x() + dims.total_u(), -1);
  for (int i = 0; i < n; ++i) {
    for (Index k : owned_coordinates(dims, slices, i)) owner[k] = i;
  }
  for (std::size_t t = 0; t < model.costs.size(); ++t) {
    const Matrix& r = model.costs[t];
    for (Index a = 0; a < r.rows(); ++a) {
      for (Index b = 0; b < r.cols(); ++b) {
        if (owner[a] != owner[b] && r(a, b) != 0.0) {
          throw StructuralError("decoupled_check: cost couples subsystems " +
                                std::to_string(owner[a]) + " and " + std::to_string(owner[b]));
        }
      }
    }
  }
}

}  // namespace

ModelSpec decoupled_subproblem(const ModelSpec& model, const std::vector<Index>& slices, int i) {
  const Dims& dims = model.dims;
  Index slice_off = 0;
  for (int j = 0; j < i; ++j) slice_off += slices[j];

  ModelSpec sub;
  sub.dims.d_x = {dims.d_x[i]};
  sub.dims.d_u0 = slices[i];
  sub.dims.d_u = {dims.d_u[i]};
  sub.dims.horizon = dims.horizon;
  const auto& pl = model.plants[i];
  sub.plants.push_back({pl.A, pl.B_local, pl.B_remote.middleCols(slice_off, slices[i])});
  const auto idx = owned_coordinates(dims, slices, i);
  for (const auto& r : model.costs) sub.costs.push_back(r(idx, idx));
  sub.noise.mu0 = {model.noise.mu0[i]};
  sub.noise.sigma0 = {model.noise.sigma0[i]};
  sub.noise.sigma_w = {model.noise.sigma_w[i]};
  sub.noise.family = model.noise.family;
  sub.channel.p = {model.channel.p[i]};
  return sub;
}

DecoupledReport decoupled_check(const ModelSpec& model, const std::vector<Index>& slices,
                                int episodes, std::uint64_t seed) {
  require_valid(model);
  require_decoupled(model, slices);
  const Dims& dims = model.dims;
  const int n = dims.n_subsystems();

  const GainSchedule joint = synthesize(model);
  std::vector<ModelSpec> subs;
  std::vector<GainSchedule> sub_gains;
  for (int i = 0; i < n; ++i) {
    subs.push_back(decoupled_subproblem(model, slices, i));
    sub_gains.push_back(synthesize(subs.back()));
  }

  DecoupledReport report;
  report.episodes = episodes;
  const Simulator sim(model, optimal_policy(joint));
  for (int k = 0; k < episodes; ++k) {
    const EpisodeTrace trace = sim.episode(seed, static_cast<std::uint64_t>(k));
    for (int t = 0; t <= dims.horizon; ++t) {
      const EpisodeStep& step = trace.steps[t];
      Index slice_off = 0;
      for (int i = 0; i < n; ++i) {
        const Index xo = dims.x_offset(i);
        CommonEstimate est{{step.xhat.segment(xo, dims.d_x[i])}, t};
        const std::vector<Vector> x{step.x.segment(xo, dims.d_x[i])};
        const ActionProfile a = compute_actions(sub_gains[i], t, est, x);
        const Vector joint_u0 = step.u0.segment(slice_off, slices[i]);
        const Vector joint_u = step.u.segment(dims.u_offset(i) - dims.d_u0, dims.d_u[i]);
        const double scale = std::max({1.0, joint_u0.cwiseAbs().maxCoeff(), joint_u.cwiseAbs().maxCoeff()});
        const double diff = std::max((a.u0 - joint_u0).cwiseAbs().maxCoeff(),
                                     (a.u[0] - joint_u).cwiseAbs().maxCoeff()) / scale;
        report.max_abs_diff = std::max(report.max_abs_diff, diff);
        slice_off += slices[i];
      }
    }
  }
  report.passed = report.max_abs_diff <= 1e-9;
  return report;
}

DecoupledReport decoupled_check(const ModelSpec& model, int episodes, std::uint64_t seed) {
  const int n = model.n_subsystems();
  if (n < 1 || model.dims.d_u0 % n != 0) {
    throw StructuralError("decoupled_check: d_u0 is not divisible by N; pass explicit slices");
  }
  return decoupled_check(model, std::vector<Index>(n, model.dims.d_u0 / n), episodes, seed);
}

ModelSpec no_action_embedding(const ModelSpec& model, const std::set<int>& idle) {
  ModelSpec out = model;
  const Dims& dims = model.dims;
  const Index nx = dims.total_x();
  for (int c : idle) {
    if (c < 0 || c > dims.n_subsystems()) {
      throw DimensionError("no_action_embedding: controller index " + std::to_string(c) + " out of range");
    }
    Index off = 0;
    Index width = 0;
    if (c == 0) {
      for (auto& pl : out.plants) pl.B_remote.setZero();
      off = nx;
      width = dims.d_u0;
    } else {
      out.plants[c - 1].B_local.setZero();
      off = nx + dims.u_offset(c - 1);
      width = dims.d_u[c - 1];
    }
    for (auto& r : out.costs) {
      r.middleRows(off, width).setZero();
      r.middleCols(off, width).setZero();
      r.block(off, off, width, width).setIdentity();
    }
  }
  return out;
}

}  // namespace netlqr
