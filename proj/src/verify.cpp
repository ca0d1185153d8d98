#include "netlqr/verify.hpp"

#include <cmath>
#include <sstream>

#include "netlqr/baselines.hpp"
#include "netlqr/oracle.hpp"
#include "netlqr/simulator.hpp"
#include "netlqr/synthesis.hpp"

namespace netlqr {

Json VerifyReport::to_json() const {
  Json checks_json = Json::array();
  for (const auto& c : checks) {
    checks_json.push_back({{"name", c.name},
                           {"passed", c.passed},
                           {"metric", c.metric},
                           {"threshold", c.threshold},
                           {"detail", c.detail}});
  }
  return {{"label", label}, {"passed", passed}, {"checks", checks_json}};
}

namespace {

bool bit_identical(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].rows() != b[k].rows() || a[k].cols() != b[k].cols() || a[k] != b[k]) return false;
  }
  return true;
}

double max_abs_diff(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, (a[k] - b[k]).cwiseAbs().maxCoeff());
  return worst;
}

CheckResult psd_check(const GainSchedule& s) {
  double worst = INFINITY;
  for (const auto& p : s.P) worst = std::min(worst, min_symmetric_eigenvalue(p));
  for (const auto& seq : s.Ptilde) {
    for (const auto& p : seq) worst = std::min(worst, min_symmetric_eigenvalue(p));
  }
  CheckResult c{"psd_invariants", worst >= kTolPsd, worst, kTolPsd, "min eigenvalue over P[t] and Ptilde[i][t]"};
  return c;
}

}  // namespace

VerifyReport verify_model(const ModelSpec& model, const VerifyOptions& options, const std::string& label) {
  VerifyReport report;
  report.label = label;
  require_valid(model);

  const GainSchedule clean = synthesize(model);
  GainSchedule schedule = clean;
  if (options.inject_gain_error) schedule.K[0](0, 0) += 0.5;

  report.checks.push_back(psd_check(clean));

  {
    const CentralizedGains central = centralized_lqr(model);
    const double diff = max_abs_diff(schedule.K, central.K);
    report.checks.push_back({"centralized_reduction", diff <= 1e-10, diff, 1e-10,
                             "max |K_decentralized - K_centralized| over all t"});
  }

  {
    ModelSpec scaled = model;
    for (auto& s : scaled.noise.sigma0) s = 2.0 * s + Matrix::Identity(s.rows(), s.cols());
    for (auto& seq : scaled.noise.sigma_w) {
      for (auto& s : seq) s = 3.0 * s + Matrix::Identity(s.rows(), s.cols());
    }
    const GainSchedule other = synthesize(scaled);
    bool same = bit_identical(clean.P, other.P) && bit_identical(clean.K, other.K);
    for (int i = 0; i < model.n_subsystems(); ++i) {
      same = same && bit_identical(clean.Ptilde[i], other.Ptilde[i]) &&
             bit_identical(clean.Ktilde[i], other.Ktilde[i]);
    }
    report.checks.push_back({"noise_independence", same, same ? 0.0 : 1.0, 0.0,
                             "gains of a model with rescaled covariances are bit-identical"});
  }

  const LinearPolicy policy = policy_from_schedule(schedule);
  const double oracle_cost = exact_cost(model, policy);
  const double value = expected_initial_value(model, clean);
  {
    const double rel = std::abs(oracle_cost - value) / std::max(1.0, std::abs(value));
    std::ostringstream d;
    d.precision(17);
    d << "exact_cost=" << oracle_cost << " expected V_0=" << value;
    report.checks.push_back({"value_oracle_identity", rel <= 1e-8, rel, 1e-8, d.str()});
  }

  if (model.n_subsystems() <= 3) {
    const double enumerated = exact_cost(model, policy, ResetAggregation::Enumerated);
    const double rel = std::abs(enumerated - oracle_cost) / std::max(1.0, std::abs(enumerated));
    report.checks.push_back({"oracle_factorization", rel <= 1e-10, rel, 1e-10,
                             "sequential mixture vs 2^N outcome enumeration"});
  }

  {
    const StationarityReport st =
        stationarity_check(model, schedule, options.epsilon, options.stationarity_trials, options.seed);
    const double scale = std::max(1.0, std::abs(st.optimal_cost));
    std::ostringstream d;
    d << "min delta=" << st.min_delta << " max |derivative|/scale=" << st.max_abs_derivative / scale
      << " over " << st.trials.size() << " perturbations";
    report.checks.push_back({"stationarity", st.passed, st.max_abs_derivative / scale, kDerivativeRelTol, d.str()});
  }

  {
    const GainSchedule failed = always_failed_gains(model);
    ModelSpec forced = model;
    forced.channel.p.assign(model.n_subsystems(), 1.0);
    const GainSchedule reference = synthesize(forced);
    bool ok = true;
    const Dims& dims = model.dims;
    for (int t = 0; ok && t <= dims.horizon; ++t) {
      const Matrix stacked = stacked_deviation_gain(failed, t);
      ok = stacked.topRows(dims.d_u0).isZero(0.0);
      for (int i = 0; ok && i < dims.n_subsystems(); ++i) {
        const Matrix block = stacked.block(dims.u_offset(i), dims.x_offset(i), dims.d_u[i], dims.d_x[i]);
        ok = block == reference.Ktilde[i][t];
        Matrix rest = stacked.middleRows(dims.u_offset(i), dims.d_u[i]);
        rest.middleCols(dims.x_offset(i), dims.d_x[i]).setZero();
        ok = ok && rest.isZero(0.0);
      }
    }
    report.checks.push_back({"always_failed_structure", ok, ok ? 0.0 : 1.0, 0.0,
                             "zero remote deviation row and block-diagonal Ktilde with p=1"});
  }

  {
    const Simulator sim(model, optimal_policy(schedule));
    std::size_t problems = 0;
    std::string first;
    for (int k = 0; k < options.trace_episodes; ++k) {
      const auto found = check_trace(model, sim.episode(options.seed, static_cast<std::uint64_t>(k)));
      if (!found.empty() && first.empty()) first = found.front();
      problems += found.size();
    }
    report.checks.push_back({"trace_invariants", problems == 0, static_cast<double>(problems), 0.0,
                             problems == 0 ? "estimator exact on received steps; costs consistent" : first});
  }

  if (options.mc_episodes > 0) {
    const CostReport mc = monte_carlo(model, schedule, options.mc_episodes, options.seed);
    const double z = mc.std_error > 0.0 ? std::abs(mc.mean - oracle_cost) / mc.std_error : 0.0;
    std::ostringstream d;
    d.precision(10);
    d << "mean=" << mc.mean << " stderr=" << mc.std_error << " oracle=" << oracle_cost;
    report.checks.push_back({"monte_carlo_consistency", z <= 4.0, z, 4.0, d.str()});
  }

  report.passed = true;
  for (const auto& c : report.checks) report.passed = report.passed && c.passed;
  return report;
}

}  // namespace netlqr
