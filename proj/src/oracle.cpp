#include "netlqr/oracle.hpp"

#include <cmath>

#include "netlqr/errors.hpp"
#include "netlqr/rng.hpp"

namespace netlqr {

LinearPolicy policy_from_schedule(const GainSchedule& schedule) {
  return {schedule.dims, schedule.K, schedule.Ktilde};
}

Policy to_policy(LinearPolicy policy) {
  return [policy = std::move(policy)](int t, const CommonEstimate& est, std::span<const Vector> x) {
    const Dims& dims = policy.dims;
    Vector xhat(dims.total_x());
    for (int i = 0; i < dims.n_subsystems(); ++i) {
      xhat.segment(dims.x_offset(i), dims.d_x[i]) = est.xhat[i];
    }
    const Vector common = policy.Kc[t] * xhat;
    ActionProfile a;
    a.u0 = common.head(dims.d_u0);
    for (int i = 0; i < dims.n_subsystems(); ++i) {
      a.ubar.push_back(common.segment(dims.u_offset(i), dims.d_u[i]));
      a.u.push_back(a.ubar.back() + policy.Kd[i][t] * (x[i] - est.xhat[i]));
    }
    return a;
  };
}

namespace {

void check_policy(const ModelSpec& model, const LinearPolicy& policy) {
  const Dims& dims = model.dims;
  const auto steps = static_cast<std::size_t>(dims.horizon) + 1;
  bool ok = policy.Kc.size() == steps && static_cast<int>(policy.Kd.size()) == dims.n_subsystems();
  for (std::size_t t = 0; ok && t < steps; ++t) {
    ok = policy.Kc[t].rows() == dims.total_u() && policy.Kc[t].cols() == dims.total_x();
  }
  for (int i = 0; ok && i < dims.n_subsystems(); ++i) {
    ok = policy.Kd[i].size() == steps;
    for (std::size_t t = 0; ok && t < steps; ++t) {
      ok = policy.Kd[i][t].rows() == dims.d_u[i] && policy.Kd[i][t].cols() == dims.d_x[i];
    }
  }
  if (!ok) throw DimensionError("oracle: policy dimensions do not match the model");
}

// Deviation gain embedded in the stacked action space: rows of local i, columns of Ê_i.
Matrix embedded_deviation_gain(const Dims& dims, const LinearPolicy& policy, int t) {
  Matrix e = Matrix::Zero(dims.total_u(), dims.total_x());
  for (int i = 0; i < dims.n_subsystems(); ++i) {
    e.block(dims.u_offset(i), dims.x_offset(i), dims.d_u[i], dims.d_x[i]) = policy.Kd[i][t];
  }
  return e;
}

// Linear map for a successful transmission on link i: X̂_i ← X̂_i + Ê_i, Ê_i ← 0.
Matrix reset_map(const Dims& dims, int i) {
  const Index d = dims.total_x();
  Matrix r = Matrix::Identity(2 * d, 2 * d);
  const Index off = dims.x_offset(i);
  const Index di = dims.d_x[i];
  r.block(off, d + off, di, di).setIdentity();
  r.block(d + off, d + off, di, di).setZero();
  return r;
}

void apply_reset(const ModelSpec& model, JointMoment& z, ResetAggregation aggregation) {
  const Dims& dims = model.dims;
  const int n = dims.n_subsystems();
  if (aggregation == ResetAggregation::Sequential) {
    for (int i = 0; i < n; ++i) {
      const double p = model.channel.p[i];
      const Matrix r = reset_map(dims, i);
      z.m1 = (1.0 - p) * (r * z.m1) + p * z.m1;
      z.M2 = (1.0 - p) * (r * z.M2 * r.transpose()) + p * z.M2;
    }
    return;
  }
  const Index size = z.m1.size();
  Vector m1 = Vector::Zero(size);
  Matrix M2 = Matrix::Zero(size, size);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double prob = 1.0;
    Matrix r = Matrix::Identity(size, size);
    for (int i = 0; i < n; ++i) {
      const double p = model.channel.p[i];
      if (mask & (1u << i)) {
        prob *= 1.0 - p;
        r = reset_map(dims, i) * r;
      } else {
        prob *= p;
      }
    }
    if (prob == 0.0) continue;
    m1 += prob * (r * z.m1);
    M2 += prob * (r * z.M2 * r.transpose());
  }
  z.m1 = std::move(m1);
  z.M2 = std::move(M2);
}

}  // namespace

std::vector<JointMoment> propagate_moments(const ModelSpec& model, const LinearPolicy& policy,
                                           ResetAggregation aggregation) {
  const GlobalDynamics g = assemble_global(model);
  check_policy(model, policy);
  const Dims& dims = model.dims;
  const Index d = dims.total_x();
  const int n = dims.n_subsystems();
  if (aggregation == ResetAggregation::Enumerated && n > 20) {
    throw Error("oracle: enumeration over 2^N outcomes needs N <= 20");
  }

  // Before the t=0 uplink: X̂ = μ0 (deterministic), Ê = X_0 − μ0.
  JointMoment z;
  z.m1 = Vector::Zero(2 * d);
  z.M2 = Matrix::Zero(2 * d, 2 * d);
  Vector mu(d);
  for (int i = 0; i < n; ++i) {
    const Index off = dims.x_offset(i);
    mu.segment(off, dims.d_x[i]) = model.noise.mu0[i];
    z.M2.block(d + off, d + off, dims.d_x[i], dims.d_x[i]) = model.noise.sigma0[i];
  }
  z.m1.head(d) = mu;
  z.M2.topLeftCorner(d, d) = mu * mu.transpose();

  std::vector<JointMoment> out;
  out.reserve(dims.horizon + 1);
  for (int t = 0; t <= dims.horizon; ++t) {
    apply_reset(model, z, aggregation);
    out.push_back(z);
    if (t == dims.horizon) break;

    // X' = A(X̂ + Ê) + B(Kc X̂ + E_d Ê) + W; on a drop X̂' = (A + B Kc) X̂,
    // hence Ê' = (A + B E_d) Ê + W.
    Matrix f = Matrix::Zero(2 * d, 2 * d);
    f.topLeftCorner(d, d) = g.A + g.B * policy.Kc[t];
    f.bottomRightCorner(d, d) = g.A + g.B * embedded_deviation_gain(dims, policy, t);
    z.m1 = f * z.m1;
    z.M2 = f * z.M2 * f.transpose();
    for (int i = 0; i < n; ++i) {
      const Index off = d + dims.x_offset(i);
      z.M2.block(off, off, dims.d_x[i], dims.d_x[i]) += model.noise.noise_cov(i, t);
    }
    z.M2 = symmetrize(z.M2);
  }
  return out;
}

std::vector<double> exact_stage_costs(const ModelSpec& model, const LinearPolicy& policy,
                                      ResetAggregation aggregation) {
  const auto moments = propagate_moments(model, policy, aggregation);
  const Dims& dims = model.dims;
  const Index d = dims.total_x();
  const Index nu = dims.total_u();
  std::vector<double> costs;
  costs.reserve(moments.size());
  for (int t = 0; t <= dims.horizon; ++t) {
    // S_t = L z with X = X̂ + Ê and U = Kc X̂ + E_d Ê.
    Matrix l(d + nu, 2 * d);
    l.topLeftCorner(d, d).setIdentity();
    l.topRightCorner(d, d).setIdentity();
    l.bottomLeftCorner(nu, d) = policy.Kc[t];
    l.bottomRightCorner(nu, d) = embedded_deviation_gain(dims, policy, t);
    const Matrix weight = l.transpose() * model.cost(t) * l;
    costs.push_back(weight.cwiseProduct(moments[t].M2).sum());
  }
  return costs;
}

double exact_cost(const ModelSpec& model, const LinearPolicy& policy, ResetAggregation aggregation) {
  double total = 0.0;
  for (double c : exact_stage_costs(model, policy, aggregation)) total += c;
  return total;
}

namespace {

struct Target {
  bool common = true;
  int subsystem = 0;
};

Matrix& gain_at(LinearPolicy& policy, const Target& target, int t) {
  return target.common ? policy.Kc[t] : policy.Kd[target.subsystem][t];
}

std::string target_name(const Target& target) {
  return target.common ? "Kc" : "Kd[" + std::to_string(target.subsystem) + "]";
}

}  // namespace

StationarityReport stationarity_check(const ModelSpec& model, const GainSchedule& schedule,
                                      double epsilon, int trials, std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw Error("stationarity_check: epsilon must be positive");
  const LinearPolicy optimal = policy_from_schedule(schedule);
  StationarityReport report;
  report.epsilon = epsilon;
  report.optimal_cost = exact_cost(model, optimal);
  const double scale = std::max(1.0, std::abs(report.optimal_cost));
  report.min_delta = INFINITY;

  Rng rng = make_rng(seed, 0, Stream::Generation);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = model.n_subsystems();
  const int steps = model.horizon() + 1;

  for (int k = 0; k < trials; ++k) {
    Target target;
    target.common = (rng() % (n + 1)) == 0;
    target.subsystem = static_cast<int>(rng() % n);
    const int t = static_cast<int>(rng() % steps);
    LinearPolicy probe = optimal;
    const Matrix base = gain_at(probe, target, t);
    Matrix direction = Matrix::Zero(base.rows(), base.cols());
    PerturbationTrial trial;
    trial.t = t;
    trial.target = target_name(target);
    if (k % 2 == 0) {
      trial.kind = "entry";
      direction(static_cast<Index>(rng() % base.rows()), static_cast<Index>(rng() % base.cols())) = 1.0;
    } else {
      trial.kind = "direction";
      for (Index r = 0; r < direction.rows(); ++r) {
        for (Index c = 0; c < direction.cols(); ++c) direction(r, c) = normal(rng);
      }
      direction /= direction.norm();
    }
    gain_at(probe, target, t) = base + epsilon * direction;
    const double plus = exact_cost(model, probe);
    gain_at(probe, target, t) = base - epsilon * direction;
    const double minus = exact_cost(model, probe);
    trial.delta_plus = plus - report.optimal_cost;
    trial.delta_minus = minus - report.optimal_cost;
    trial.derivative = (plus - minus) / (2.0 * epsilon);
    report.min_delta = std::min({report.min_delta, trial.delta_plus, trial.delta_minus});
    report.max_abs_derivative = std::max(report.max_abs_derivative, std::abs(trial.derivative));
    report.trials.push_back(std::move(trial));
  }
  if (trials == 0) report.min_delta = 0.0;
  report.passed = report.min_delta >= kDeltaCostFloor &&
                  report.max_abs_derivative <= kDerivativeRelTol * scale;
  return report;
}

double max_relative_gradient(const ModelSpec& model, const LinearPolicy& policy, double epsilon) {
  const double j0 = exact_cost(model, policy);
  const double scale = std::max(1.0, std::abs(j0));
  double worst = 0.0;
  LinearPolicy probe = policy;
  auto sweep = [&](Matrix& gain) {
    for (Index r = 0; r < gain.rows(); ++r) {
      for (Index c = 0; c < gain.cols(); ++c) {
        const double keep = gain(r, c);
        gain(r, c) = keep + epsilon;
        const double plus = exact_cost(model, probe);
        gain(r, c) = keep - epsilon;
        const double minus = exact_cost(model, probe);
        gain(r, c) = keep;
        worst = std::max(worst, std::abs(plus - minus) / (2.0 * epsilon) / scale);
      }
    }
  };
  for (auto& k : probe.Kc) sweep(k);
  for (auto& seq : probe.Kd) {
    for (auto& k : seq) sweep(k);
  }
  return worst;
}

}  // namespace netlqr
