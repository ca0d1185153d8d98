// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "netlqr/baselines.hpp"
#include "netlqr/errors.hpp"
#include "netlqr/oracle.hpp"
#include "netlqr/simulator.hpp"
#include "netlqr/synthesis.hpp"

using namespace netlqr;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

Dims uniform_dims(int n, Index dx, Index du, int horizon) {
  Dims d;
  d.d_x.assign(n, dx);
  d.d_u0 = du;
  d.d_u.assign(n, du);
  d.horizon = horizon;
  return d;
}

ModelSpec seeded_model(const Dims& dims, std::uint64_t seed, double p = 0.5, double hi = 20.0) {
  RandomModelOptions opt;
  opt.seed = seed;
  opt.p = p;
  opt.hi = hi;
  return random_model(dims, opt);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Criterion tolerances.
constexpr double kCentralizedTol = 1e-10;
constexpr double kValueRelTol = 1e-8;
constexpr double kZBound = 4.0;
constexpr double kFactorizationTol = 1e-10;
constexpr double kDecoupledTol = 1e-9;
constexpr std::uint64_t kMcEpisodes = 10000;
constexpr std::uint64_t kEstimatorEpisodes = 100000;

Outcome centralized_reduction() {
  const int ns[] = {1, 2, 5};
  double worst = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (int k = 0; k < 100; ++k) {
    const ModelSpec model = seeded_model(uniform_dims(ns[k % 3], 3, 3, 50), 1000 + k);
    const GainSchedule s = synthesize(model);
    const CentralizedGains c = centralized_lqr(model);
    for (int t = 0; t <= model.horizon(); ++t) worst = std::max(worst, max_abs(s.K[t] - c.K[t]));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= kCentralizedTol && secs < 60.0,
          "100 models, max |dK| " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Outcome value_oracle_identity() {
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int n = 1 + k % 3;
    const Index d = 1 + (k / 3) % 3;
    const int horizon = 5 + (k * 7) % 46;
    const ModelSpec model = seeded_model(uniform_dims(n, d, d, horizon), 2000 + k);
    const GainSchedule s = synthesize(model);
    const double oracle = exact_cost(model, policy_from_schedule(s));
    const double value = expected_initial_value(model, s);
    worst = std::max(worst, std::abs(oracle - value) / std::max(1.0, std::abs(value)));
  }
  return {worst <= kValueRelTol, "20 models, max relative gap " + fmt(worst)};
}

Outcome monte_carlo_consistency() {
  std::vector<ModelSpec> models{scalar_test_instance()};
  for (int k = 0; k < 5; ++k) models.push_back(seeded_model(uniform_dims(2, 2, 2, 10), 3000 + k));
  double worst = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < models.size(); ++k) {
    const GainSchedule s = synthesize(models[k]);
    const CostReport r = monte_carlo(models[k], s, kMcEpisodes, 31 + k);
    const double oracle = exact_cost(models[k], policy_from_schedule(s));
    worst = std::max(worst, std::abs(r.mean - oracle) / r.std_error);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= kZBound && secs < 60.0,
          "6 models x 1e4 episodes, max |z| " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Outcome stationarity() {
  double min_delta = INFINITY;
  double worst_grad = 0.0;
  int trials = 0;
  bool ok = true;
  for (int k = 0; k < 5; ++k) {
    const ModelSpec model = seeded_model(uniform_dims(1 + k % 3, 3, 3, 20), 4000 + k);
    const GainSchedule s = synthesize(model);
    const StationarityReport r = stationarity_check(model, s, 1e-3, 40, 4100 + k);
    trials += static_cast<int>(r.trials.size());
    min_delta = std::min(min_delta, r.min_delta);
    const double grad = max_relative_gradient(model, policy_from_schedule(s), 1e-4);
    worst_grad = std::max(worst_grad, grad);
    ok = ok && r.min_delta >= kDeltaCostFloor && grad <= kDerivativeRelTol;
  }
  return {ok && trials == 200, std::to_string(trials) + " perturbations, min dJ " + fmt(min_delta) +
                                   ", max relative gradient " + fmt(worst_grad)};
}

Outcome psd_invariants() {
  const int ns[] = {1, 2, 5};
  double worst = INFINITY;
  for (int k = 0; k < 100; ++k) {
    const ModelSpec model = seeded_model(uniform_dims(ns[k % 3], 3, 3, 50), 5000 + k);
    const GainSchedule s = synthesize(model);
    for (const auto& p : s.P) worst = std::min(worst, min_symmetric_eigenvalue(p));
    for (const auto& seq : s.Ptilde) {
      for (const auto& p : seq) worst = std::min(worst, min_symmetric_eigenvalue(p));
    }
  }
  return {worst >= kTolPsd, "100 syntheses, min eigenvalue " + fmt(worst)};
}

Outcome noise_independence() {
  bool same = true;
  for (int k = 0; k < 5; ++k) {
    const ModelSpec model = seeded_model(uniform_dims(1 + k % 3, 3, 2, 20), 6000 + k);
    ModelSpec other = model;
    for (auto& s : other.noise.sigma0) s = 5.0 * s + Matrix::Identity(s.rows(), s.cols());
    for (auto& seq : other.noise.sigma_w) {
      for (auto& s : seq) s.setZero();
    }
    const GainSchedule a = synthesize(model);
    const GainSchedule b = synthesize(other);
    for (int t = 0; t <= model.horizon(); ++t) {
      same = same && a.K[t] == b.K[t];
      for (int i = 0; i < model.n_subsystems(); ++i) same = same && a.Ktilde[i][t] == b.Ktilde[i][t];
    }
  }
  return {same, same ? "5 model pairs, K and Ktilde bit-identical" : "gains differ"};
}

Outcome distribution_freeness() {
  std::vector<ModelSpec> models{scalar_test_instance(), seeded_model(uniform_dims(2, 2, 2, 10), 7000)};
  double worst = 0.0;
  for (std::size_t k = 0; k < models.size(); ++k) {
    const GainSchedule s = synthesize(models[k]);
    const double v0 = expected_initial_value(models[k], s);
    for (NoiseFamily family : {NoiseFamily::Gaussian, NoiseFamily::Uniform}) {
      MonteCarloOptions opt;
      opt.simulation.sampler = make_sampler(family);
      const CostReport r = monte_carlo(models[k], s, kMcEpisodes, 71 + k, opt);
      worst = std::max(worst, std::abs(r.mean - v0) / r.std_error);
    }
  }
  return {worst <= kZBound, "gaussian and uniform noise on 2 models, max |z| " + fmt(worst)};
}

Outcome oracle_factorization() {
  double worst = 0.0;
  int count = 0;
  for (int n = 1; n <= 3; ++n) {
    for (int k = 0; k < 4; ++k) {
      const ModelSpec model = seeded_model(uniform_dims(n, 1 + k % 3, 2, 8), 8000 + 10 * n + k, 0.2 + 0.2 * k);
      const LinearPolicy policy = policy_from_schedule(synthesize(model));
      const double seq = exact_cost(model, policy, ResetAggregation::Sequential);
      const double en = exact_cost(model, policy, ResetAggregation::Enumerated);
      worst = std::max(worst, std::abs(seq - en) / std::max(1.0, std::abs(en)));
      ++count;
    }
  }
  return {worst <= kFactorizationTol, std::to_string(count) + " models, max relative gap " + fmt(worst)};
}

// A decoupled N-subsystem model: each plant driven by its own remote slice,
// cost additive over (x_i, u0 slice i, u_i).
ModelSpec decoupled_model(int n, Index d, std::uint64_t seed) {
  const ModelSpec base = seeded_model(uniform_dims(n, d, d, 12), seed);
  ModelSpec m = base;
  m.dims.d_u0 = d * n;
  std::vector<Index> slices(n, d);
  for (int i = 0; i < n; ++i) {
    m.plants[i].B_remote = Matrix::Zero(d, d * n);
    m.plants[i].B_remote.middleCols(d * i, d) = base.plants[i].B_remote;
  }
  const Index total = m.dims.total_x() + m.dims.total_u();
  m.costs.clear();
  for (int t = 0; t <= m.horizon(); ++t) {
    Matrix r = Matrix::Zero(total, total);
    for (int i = 0; i < n; ++i) {
      const ModelSpec one = seeded_model(uniform_dims(1, d, d, 0), seed * 131 + 7 * t + i);
      const Matrix& ri = one.costs[0];
      std::vector<Index> idx;
      for (Index k = 0; k < d; ++k) idx.push_back(m.dims.x_offset(i) + k);
      for (Index k = 0; k < d; ++k) idx.push_back(m.dims.total_x() + d * i + k);
      for (Index k = 0; k < d; ++k) idx.push_back(m.dims.total_x() + m.dims.u_offset(i) + k);
      r(idx, idx) = ri;
    }
    m.costs.push_back(r);
  }
  return m;
}

Outcome special_cases() {
  std::ostringstream detail;
  bool ok = true;

  // Idle controllers.
  const ModelSpec base = seeded_model(uniform_dims(3, 2, 2, 10), 9000);
  const std::vector<std::set<int>> idle_sets{{0}, {2}, {0, 1, 3}};
  std::size_t nonzero = 0;
  for (const auto& idle : idle_sets) {
    const ModelSpec model = no_action_embedding(base, idle);
    const GainSchedule s = synthesize(model);
    const Simulator sim(model, optimal_policy(s));
    for (std::uint64_t e = 0; e < 20; ++e) {
      const EpisodeTrace tr = sim.episode(91, e);
      for (const auto& step : tr.steps) {
        for (int c : idle) {
          const Vector a = c == 0 ? step.u0
                                  : Vector(step.u.segment(model.dims.u_offset(c - 1) - model.dims.d_u0,
                                                          model.dims.d_u[c - 1]));
          if (!(a.array() == 0.0).all()) ++nonzero;
        }
      }
    }
  }
  ok = ok && nonzero == 0;
  detail << "idle nonzero actions " << nonzero;

  // Decoupled systems.
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) {
    const ModelSpec m = decoupled_model(2 + k % 2, 1 + k % 2, 9100 + k);
    const DecoupledReport r = decoupled_check(m, 5, 92 + k);
    worst = std::max(worst, r.max_abs_diff);
    ok = ok && r.passed;
  }
  ok = ok && worst <= kDecoupledTol;
  bool rejected = false;
  try {
    ModelSpec coupled = decoupled_model(2, 1, 9200);
    for (auto& r : coupled.costs) r(0, 1) = r(1, 0) = 0.1;
    decoupled_check(coupled, 1, 0);
  } catch (const StructuralError&) {
    rejected = true;
  }
  ok = ok && rejected;
  detail << ", decoupled max relative gap " << fmt(worst) << (rejected ? ", coupling rejected" : ", coupling NOT rejected");

  // Always-failed gain structure.
  bool structure = true;
  for (int k = 0; k < 5; ++k) {
    const ModelSpec model = seeded_model(uniform_dims(1 + k % 3, 2, 3, 10), 9300 + k);
    const GainSchedule failed = always_failed_gains(model);
    ModelSpec forced = model;
    forced.channel.p.assign(model.n_subsystems(), 1.0);
    const GainSchedule reference = synthesize(forced);
    const Dims& dims = model.dims;
    for (int t = 0; t <= dims.horizon; ++t) {
      const Matrix stacked = stacked_deviation_gain(failed, t);
      structure = structure && stacked.topRows(dims.d_u0).isZero(0.0);
      for (int i = 0; i < dims.n_subsystems(); ++i) {
        structure = structure && failed.Ktilde[i][t] == reference.Ktilde[i][t];
        for (int j = 0; j < dims.n_subsystems(); ++j) {
          if (j == i) continue;
          structure = structure &&
                      stacked.block(dims.u_offset(i), dims.x_offset(j), dims.d_u[i], dims.d_x[j]).isZero(0.0);
        }
      }
    }
  }
  ok = ok && structure;
  detail << (structure ? ", p=1 deviation gain block-diagonal" : ", p=1 structure broken");
  return {ok, detail.str()};
}

// Per (t, i) running sums of the estimation error under a fixed channel sequence.
Outcome estimator_exactness() {
  struct Case {
    ModelSpec model;
    ChannelSchedule channel;
  };
  std::vector<Case> cases;
  cases.push_back({scalar_test_instance(), {{{0}, {1}, {0}}}});
  {
    ModelSpec m = seeded_model(uniform_dims(2, 2, 2, 4), 10000, 0.5, 2.0);
    cases.push_back({m, {{{0, 1}, {0, 0}, {1, 0}, {0, 0}, {0, 1}}}});
  }

  std::size_t mismatches = 0;
  double worst_z = 0.0;
  std::size_t tested = 0;
  for (auto& c : cases) {
    const GainSchedule s = synthesize(c.model);
    SimulationOptions forced;
    forced.forced_channel = c.channel;
    const Simulator sim(c.model, optimal_policy(s), forced);
    const Simulator free_sim(c.model, optimal_policy(s));
    const Index nx = c.model.dims.total_x();
    const int steps = c.model.horizon() + 1;
    std::vector<Vector> sum(steps, Vector::Zero(nx));
    std::vector<Vector> sumsq(steps, Vector::Zero(nx));
    for (std::uint64_t e = 0; e < kEstimatorEpisodes; ++e) {
      const EpisodeTrace tr = sim.episode(101, e);
      for (int t = 0; t < steps; ++t) {
        const Vector err = tr.steps[t].x - tr.steps[t].xhat;
        sum[t] += err;
        sumsq[t] += err.cwiseProduct(err);
      }
      // Received steps on random channels must reset exactly.
      if (e < 2000) {
        const EpisodeTrace fr = free_sim.episode(102, e);
        for (const auto& st : fr.steps) {
          for (int i = 0; i < c.model.n_subsystems(); ++i) {
            const Index o = c.model.dims.x_offset(i);
            const Index d = c.model.dims.d_x[i];
            if (st.gamma[i] && st.x.segment(o, d) != st.xhat.segment(o, d)) ++mismatches;
          }
        }
      }
    }
    const double m = static_cast<double>(kEstimatorEpisodes);
    for (int t = 0; t < steps; ++t) {
      for (int i = 0; i < c.model.n_subsystems(); ++i) {
        const Index o = c.model.dims.x_offset(i);
        for (Index k = 0; k < c.model.dims.d_x[i]; ++k) {
          const double mean = sum[t](o + k) / m;
          const double var = (sumsq[t](o + k) - m * mean * mean) / (m - 1.0);
          if (c.channel.gamma[t][i]) {
            if (sumsq[t](o + k) != 0.0) ++mismatches;
            continue;
          }
          ++tested;
          worst_z = std::max(worst_z, std::abs(mean) / std::sqrt(var / m));
        }
      }
    }
  }
  return {mismatches == 0 && worst_z <= kZBound,
          std::to_string(mismatches) + " reset mismatches, " + std::to_string(tested) +
              " drop-step error means, max |z| " + fmt(worst_z)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"centralized reduction", centralized_reduction},
      {"value/oracle identity", value_oracle_identity},
      {"Monte Carlo consistency", monte_carlo_consistency},
      {"optimality stationarity", stationarity},
      {"PSD invariants", psd_invariants},
      {"noise-independence of gains", noise_independence},
      {"distribution-freeness", distribution_freeness},
      {"oracle factorization", oracle_factorization},
      {"special cases", special_cases},
      {"estimator exactness and zero mean", estimator_exactness},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.passed ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.passed ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
