#include <doctest.h>

#include <sstream>

#include "netlqr/baselines.hpp"
#include "netlqr/errors.hpp"
#include "netlqr/oracle.hpp"
#include "netlqr/simulator.hpp"
#include "test_support.hpp"

using namespace netlqr;
using netlqr::test::max_abs;
using netlqr::test::seeded_model;
using netlqr::test::uniform_dims;

TEST_CASE("degenerate channels") {
  Rng rng = make_rng(1, 0, Stream::Channel);
  const ChannelSpec always{{0.0, 0.0}};
  const ChannelSpec never{{1.0, 1.0}};
  for (int k = 0; k < 1000; ++k) {
    CHECK(sample_channel(always, rng) == std::vector<std::uint8_t>{1, 1});
    CHECK(sample_channel(never, rng) == std::vector<std::uint8_t>{0, 0});
  }
}

TEST_CASE("fair channel empirical rate") {
  Rng rng = make_rng(2, 0, Stream::Channel);
  const ChannelSpec fair{{0.5}};
  std::uint64_t received = 0;
  for (int k = 0; k < 1000000; ++k) received += sample_channel(fair, rng)[0];
  CHECK(std::abs(received / 1e6 - 0.5) <= 0.002);
}

TEST_CASE("plant step") {
  ModelSpec m = scalar_test_instance();
  const Vector one = Vector::Constant(1, 1.0);
  CHECK(step_plant(m, 0, one, Vector::Constant(1, 2.0), Vector::Constant(1, 3.0), Vector::Constant(1, 4.0))(0) ==
        10.0);
  m.plants[0].A.setZero();
  m.plants[0].B_local.setZero();
  m.plants[0].B_remote.setZero();
  CHECK(step_plant(m, 0, one, one, one, Vector::Zero(1))(0) == 0.0);
  CHECK_THROWS_AS(step_plant(m, 0, Vector::Zero(2), one, one, one), DimensionError);
}

TEST_CASE("standardized samplers have zero mean and unit variance") {
  for (NoiseFamily family : {NoiseFamily::Gaussian, NoiseFamily::Uniform}) {
    const auto sampler = make_sampler(family);
    Rng rng = make_rng(3, 0, Stream::ProcessNoise);
    const int n = 100000;
    double sum = 0.0;
    double sq = 0.0;
    for (int k = 0; k < n; ++k) {
      const double v = sampler->standard(1, rng)(0);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) <= 4.0 / std::sqrt(n));
    CHECK(std::abs(var - 1.0) <= 0.02);
  }
  CHECK_THROWS_AS(make_sampler(NoiseFamily::Custom), Error);
}

TEST_CASE("system at rest stays at rest") {
  ModelSpec m = seeded_model(uniform_dims(2, 2, 2, 6), 4);
  for (auto& mu : m.noise.mu0) mu.setZero();
  for (auto& s : m.noise.sigma0) s.setZero();
  for (auto& seq : m.noise.sigma_w) {
    for (auto& s : seq) s.setZero();
  }
  const GainSchedule s = synthesize(m);
  const EpisodeTrace tr = simulate_episode(m, s, 5);
  for (const auto& st : tr.steps) {
    CHECK(st.x.isZero(0.0));
    CHECK(st.xhat.isZero(0.0));
    CHECK(st.u0.isZero(0.0));
    CHECK(st.u.isZero(0.0));
    CHECK(st.cost == 0.0);
  }
  CHECK(tr.total_cost == 0.0);
}

TEST_CASE("reliable links reproduce the centralized closed loop") {
  const ModelSpec m = seeded_model(uniform_dims(3, 2, 2, 8), 6, 0.0, 3.0);
  const GainSchedule s = synthesize(m);
  const CentralizedGains c = centralized_lqr(m);
  const Simulator dec(m, optimal_policy(s));
  const Simulator cen(m, centralized_policy(c, m.dims));
  for (std::uint64_t e = 0; e < 5; ++e) {
    const EpisodeTrace a = dec.episode(7, e);
    const EpisodeTrace b = cen.episode(7, e);
    for (std::size_t t = 0; t < a.steps.size(); ++t) {
      const double scale = std::max(1.0, max_abs(a.steps[t].x));
      CHECK(max_abs(a.steps[t].x - b.steps[t].x) <= 1e-9 * scale);
      CHECK(max_abs(a.steps[t].u0 - b.steps[t].u0) <= 1e-9 * scale);
      CHECK(max_abs(a.steps[t].u - b.steps[t].u) <= 1e-9 * scale);
      CHECK(a.steps[t].x == a.steps[t].xhat);
    }
  }
}

TEST_CASE("episodes are reproducible") {
  const ModelSpec m = seeded_model(uniform_dims(2, 2, 2, 6), 8);
  const GainSchedule s = synthesize(m);
  const Simulator sim(m, optimal_policy(s));
  const EpisodeTrace a = sim.episode(11, 3);
  const EpisodeTrace b = sim.episode(11, 3);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t t = 0; t < a.steps.size(); ++t) {
    CHECK(a.steps[t].x == b.steps[t].x);
    CHECK(a.steps[t].u == b.steps[t].u);
    CHECK(a.steps[t].gamma == b.steps[t].gamma);
  }
  CHECK(a.total_cost == b.total_cost);
  CHECK(sim.episode(11, 4).total_cost != a.total_cost);
  CHECK(check_trace(m, a).empty());
}

TEST_CASE("Monte Carlo reports") {
  const ModelSpec m = scalar_test_instance();
  const GainSchedule s = synthesize(m);

  const CostReport one = monte_carlo(m, s, 1, 9);
  CHECK(one.std_error == 0.0);
  CHECK(one.mean == simulate_episode(m, s, 9).total_cost);

  MonteCarloOptions serial;
  serial.threads = 1;
  serial.per_step_profile = true;
  MonteCarloOptions parallel = serial;
  parallel.threads = 4;
  const CostReport a = monte_carlo(m, s, 2000, 10, serial);
  const CostReport b = monte_carlo(m, s, 2000, 10, parallel);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  REQUIRE(a.per_step_mean.size() == 3);
  double profile = 0.0;
  for (double c : a.per_step_mean) profile += c;
  CHECK(profile == doctest::Approx(a.mean).epsilon(1e-12));
}

TEST_CASE("scalar instance Monte Carlo matches the expected value") {
  const ModelSpec m = scalar_test_instance();
  const GainSchedule s = synthesize(m);
  const CostReport r = monte_carlo(m, s, 10000, 12);
  CHECK(std::abs(r.mean - 20117.0 / 3828) <= 4.0 * r.std_error);
}

TEST_CASE("detuned gains cost more") {
  const ModelSpec m = seeded_model(uniform_dims(2, 2, 2, 10), 13, 0.5, 5.0);
  const GainSchedule s = synthesize(m);
  LinearPolicy detuned = policy_from_schedule(s);
  for (auto& k : detuned.Kc) k *= 1.1;
  for (auto& seq : detuned.Kd) {
    for (auto& k : seq) k *= 1.1;
  }
  const CostReport opt = monte_carlo(m, s, 10000, 14);
  const CostReport bad = monte_carlo(m, to_policy(detuned), 10000, 15);
  const double combined = std::sqrt(opt.std_error * opt.std_error + bad.std_error * bad.std_error);
  CHECK(bad.mean - opt.mean > 4.0 * combined);
  CHECK(exact_cost(m, detuned) > exact_cost(m, policy_from_schedule(s)));
}

TEST_CASE("forced drops never reset the estimate") {
  ModelSpec m = seeded_model(uniform_dims(2, 2, 2, 6), 16);
  const GainSchedule s = always_failed_gains(m);
  SimulationOptions opt;
  opt.forced_channel = ChannelSchedule{std::vector<std::vector<std::uint8_t>>(7, {0, 0})};
  const Simulator sim(m, optimal_policy(s), opt);
  for (std::uint64_t e = 0; e < 10; ++e) {
    for (const auto& st : sim.episode(17, e).steps) {
      for (Index k = 0; k < st.x.size(); ++k) CHECK(st.x(k) != st.xhat(k));
    }
  }
  opt.forced_channel = ChannelSchedule{std::vector<std::vector<std::uint8_t>>(3, {0, 0})};
  CHECK_THROWS_AS(Simulator(m, optimal_policy(s), opt), DimensionError);
}

TEST_CASE("trace CSV layout") {
  const ModelSpec m = seeded_model(uniform_dims(2, 1, 1, 2), 18);
  const GainSchedule s = synthesize(m);
  std::ostringstream out;
  write_trace_csv_header(out);
  write_trace_csv(out, 0, m, simulate_episode(m, s, 1));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "episode,t,subsystem,gamma,state,estimate,action_common,action,stage_cost");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3 * 3);
}
