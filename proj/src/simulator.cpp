#include "netlqr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include "netlqr/errors.hpp"

namespace netlqr {

Vector GaussianSampler::standard(Index d, Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  for (Index k = 0; k < d; ++k) v(k) = normal(rng);
  return v;
}

Vector UniformSampler::standard(Index d, Rng& rng) const {
  const double half_width = std::sqrt(3.0);
  Vector v(d);
  for (Index k = 0; k < d; ++k) v(k) = half_width * (2.0 * uniform01(rng) - 1.0);
  return v;
}

std::shared_ptr<const NoiseSampler> make_sampler(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::Gaussian: return std::make_shared<GaussianSampler>();
    case NoiseFamily::Uniform: return std::make_shared<UniformSampler>();
    case NoiseFamily::Custom: break;
  }
  throw Error("custom noise family needs a sampler supplied through SimulationOptions");
}

std::vector<std::uint8_t> sample_channel(const ChannelSpec& channel, Rng& rng) {
  std::vector<std::uint8_t> gamma(channel.p.size());
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    gamma[i] = uniform01(rng) < 1.0 - channel.p[i] ? 1 : 0;
  }
  return gamma;
}

Vector step_plant(const ModelSpec& model, int i, const Vector& x, const Vector& u, const Vector& u0,
                  const Vector& w) {
  const auto& pl = model.plants.at(i);
  if (x.size() != pl.A.cols() || u.size() != pl.B_local.cols() || u0.size() != pl.B_remote.cols() ||
      w.size() != pl.A.rows()) {
    throw DimensionError("step_plant: subsystem " + std::to_string(i) + " has wrong sizes");
  }
  return pl.A * x + pl.B_local * u + pl.B_remote * u0 + w;
}

Simulator::Simulator(const ModelSpec& model, Policy policy, SimulationOptions options)
    : model_(model), policy_(std::move(policy)), options_(std::move(options)) {
  require_valid(model_);
  if (!options_.sampler) options_.sampler = make_sampler(model_.noise.family);
  const int n = model_.n_subsystems();
  if (options_.forced_channel) {
    const auto& g = options_.forced_channel->gamma;
    bool ok = static_cast<int>(g.size()) == model_.horizon() + 1;
    for (const auto& row : g) ok = ok && static_cast<int>(row.size()) == n;
    if (!ok) throw DimensionError("Simulator: forced channel must be (T+1) x N");
  }
  for (int i = 0; i < n; ++i) {
    init_factor_.push_back(psd_factor(model_.noise.sigma0[i]));
    std::vector<Matrix> per_step;
    for (const auto& cov : model_.noise.sigma_w[i]) per_step.push_back(psd_factor(cov));
    noise_factor_.push_back(std::move(per_step));
  }
}

EpisodeTrace Simulator::episode(std::uint64_t seed, std::uint64_t index) const {
  const Dims& dims = model_.dims;
  const int n = dims.n_subsystems();
  const int T = dims.horizon;
  Rng init_rng = make_rng(seed, index, Stream::InitialState);
  Rng channel_rng = make_rng(seed, index, Stream::Channel);
  Rng noise_rng = make_rng(seed, index, Stream::ProcessNoise);
  const NoiseSampler& sampler = *options_.sampler;

  std::vector<Vector> x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = model_.noise.mu0[i] + init_factor_[i] * sampler.standard(dims.d_x[i], init_rng);
  }

  EpisodeTrace trace;
  trace.steps.reserve(T + 1);
  CommonEstimate est;
  ActionProfile prev;
  std::vector<double> stage_costs;
  stage_costs.reserve(T + 1);
  Vector stacked_state(dims.total_x() + dims.total_u());

  for (int t = 0; t <= T; ++t) {
    std::vector<std::uint8_t> gamma = options_.forced_channel
                                          ? options_.forced_channel->gamma[t]
                                          : sample_channel(model_.channel, channel_rng);
    UplinkObservation z = UplinkObservation::all_dropped(n);
    for (int i = 0; i < n; ++i) {
      if (gamma[i]) z.z[i] = x[i];
    }
    est = t == 0 ? init_estimate(model_.noise, z) : update_estimate(est, prev.ubar, prev.u0, z, model_);

    ActionProfile a = policy_(t, est, x);

    EpisodeStep step;
    step.x.resize(dims.total_x());
    step.xhat.resize(dims.total_x());
    step.ubar.resize(dims.total_u() - dims.d_u0);
    step.u.resize(dims.total_u() - dims.d_u0);
    for (int i = 0; i < n; ++i) {
      step.x.segment(dims.x_offset(i), dims.d_x[i]) = x[i];
      step.xhat.segment(dims.x_offset(i), dims.d_x[i]) = est.xhat[i];
      const Index uo = dims.u_offset(i) - dims.d_u0;
      step.ubar.segment(uo, dims.d_u[i]) = a.ubar[i];
      step.u.segment(uo, dims.d_u[i]) = a.u[i];
    }
    step.u0 = a.u0;
    step.gamma = std::move(gamma);
    stacked_state << step.x, a.u0, step.u;
    step.cost = stacked_state.dot(model_.cost(t) * stacked_state);
    stage_costs.push_back(step.cost);

    for (int i = 0; i < n; ++i) {
      const Matrix& factor = noise_factor_[i].size() == 1 ? noise_factor_[i].front() : noise_factor_[i][t];
      const Vector w = factor * sampler.standard(dims.d_x[i], noise_rng);
      x[i] = step_plant(model_, i, x[i], a.u[i], a.u0, w);
    }
    trace.steps.push_back(std::move(step));
    prev = std::move(a);
  }
  trace.x_final.resize(dims.total_x());
  for (int i = 0; i < n; ++i) trace.x_final.segment(dims.x_offset(i), dims.d_x[i]) = x[i];
  trace.total_cost = pairwise_sum(stage_costs);
  return trace;
}

EpisodeTrace simulate_episode(const ModelSpec& model, const GainSchedule& schedule,
                              std::uint64_t seed, const SimulationOptions& options) {
  return Simulator(model, optimal_policy(schedule), options).episode(seed, 0);
}

CostReport monte_carlo(const ModelSpec& model, const Policy& policy, std::uint64_t episodes,
                       std::uint64_t seed, const MonteCarloOptions& options) {
  if (episodes < 1) throw Error("monte_carlo: need at least one episode");
  const Simulator sim(model, policy, options.simulation);
  const int steps = model.horizon() + 1;

  std::vector<double> totals(episodes);
  std::vector<double> profile(options.per_step_profile ? episodes * steps : 0);

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::min<std::uint64_t>(episodes, 64)));

  auto worker = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t k = begin; k < end; ++k) {
      const EpisodeTrace trace = sim.episode(seed, k);
      totals[k] = trace.total_cost;
      if (options.per_step_profile) {
        for (int t = 0; t < steps; ++t) profile[k * steps + t] = trace.steps[t].cost;
      }
    }
  };
  if (threads == 1) {
    worker(0, episodes);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (episodes + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(episodes, begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  CostReport report;
  report.episodes = episodes;
  report.seed = seed;
  const double m = static_cast<double>(episodes);
  report.mean = pairwise_sum(totals) / m;
  if (episodes > 1) {
    std::vector<double> sq(episodes);
    for (std::uint64_t k = 0; k < episodes; ++k) sq[k] = (totals[k] - report.mean) * (totals[k] - report.mean);
    report.std_error = std::sqrt(pairwise_sum(sq) / (m - 1.0)) / std::sqrt(m);
  }
  if (options.per_step_profile) {
    report.per_step_mean.resize(steps);
    std::vector<double> column(episodes);
    for (int t = 0; t < steps; ++t) {
      for (std::uint64_t k = 0; k < episodes; ++k) column[k] = profile[k * steps + t];
      report.per_step_mean[t] = pairwise_sum(column) / m;
    }
  }
  return report;
}

CostReport monte_carlo(const ModelSpec& model, const GainSchedule& schedule,
                       std::uint64_t episodes, std::uint64_t seed, const MonteCarloOptions& options) {
  return monte_carlo(model, optimal_policy(schedule), episodes, seed, options);
}

std::vector<std::string> check_trace(const ModelSpec& model, const EpisodeTrace& trace) {
  std::vector<std::string> problems;
  const Dims& dims = model.dims;
  std::vector<double> costs;
  Vector s(dims.total_x() + dims.total_u());
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const EpisodeStep& step = trace.steps[t];
    const std::string at = "t=" + std::to_string(t);
    for (int i = 0; i < dims.n_subsystems(); ++i) {
      if (!step.gamma[i]) continue;
      const Index off = dims.x_offset(i);
      if (step.xhat.segment(off, dims.d_x[i]) != step.x.segment(off, dims.d_x[i])) {
        problems.push_back(at + ": estimate of subsystem " + std::to_string(i) +
                           " differs from the state after a successful transmission");
      }
    }
    s << step.x, step.u0, step.u;
    const double expected = s.dot(model.cost(static_cast<int>(t)) * s);
    const double tol = 1e-12 * std::max(1.0, std::abs(expected));
    if (std::abs(expected - step.cost) > tol) problems.push_back(at + ": stage cost is not SᵀRS");
    if (step.cost < -tol) problems.push_back(at + ": negative stage cost");
    costs.push_back(step.cost);
  }
  const double total = pairwise_sum(costs);
  if (std::abs(total - trace.total_cost) > 1e-12 * std::max(1.0, std::abs(total))) {
    problems.push_back("total cost differs from the sum of stage costs");
  }
  return problems;
}

namespace {

void write_cell(std::ostream& out, const Eigen::Ref<const Vector>& v) {
  for (Index k = 0; k < v.size(); ++k) {
    if (k) out << ' ';
    out << v(k);
  }
}

}  // namespace

void write_trace_csv_header(std::ostream& out) {
  out << "episode,t,subsystem,gamma,state,estimate,action_common,action,stage_cost\n";
}

void write_trace_csv(std::ostream& out, std::uint64_t episode, const ModelSpec& model,
                     const EpisodeTrace& trace) {
  const Dims& dims = model.dims;
  const auto old_precision = out.precision(17);
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const EpisodeStep& step = trace.steps[t];
    // Remote controller row: only its action is meaningful.
    out << episode << ',' << t << ",0,,,,";
    write_cell(out, step.u0);
    out << ',';
    write_cell(out, step.u0);
    out << ',' << step.cost << '\n';
    for (int i = 0; i < dims.n_subsystems(); ++i) {
      const Index xo = dims.x_offset(i);
      const Index uo = dims.u_offset(i) - dims.d_u0;
      out << episode << ',' << t << ',' << (i + 1) << ',' << int{step.gamma[i]} << ',';
      write_cell(out, step.x.segment(xo, dims.d_x[i]));
      out << ',';
      write_cell(out, step.xhat.segment(xo, dims.d_x[i]));
      out << ',';
      write_cell(out, step.ubar.segment(uo, dims.d_u[i]));
      out << ',';
      write_cell(out, step.u.segment(uo, dims.d_u[i]));
      out << ',' << step.cost << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace netlqr
