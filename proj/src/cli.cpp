#include "netlqr/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "netlqr/baselines.hpp"
#include "netlqr/errors.hpp"
#include "netlqr/gains_io.hpp"
#include "netlqr/model_io.hpp"
#include "netlqr/simulator.hpp"
#include "netlqr/synthesis.hpp"
#include "netlqr/verify.hpp"

namespace netlqr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> parse_number_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(flag + ": cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw ValidationError(flag + ": expected a comma-separated list");
  return out;
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto v = parse_number_list(text, "--entry-range");
  if (v.size() != 2 || !(v[0] < v[1])) throw ValidationError("--entry-range: expected lo,hi with lo < hi");
  return {v[0], v[1]};
}

Dims uniform_dims(int n, Index dx, Index du, int horizon) {
  Dims d;
  d.d_x.assign(n, dx);
  d.d_u0 = du;
  d.d_u.assign(n, du);
  d.horizon = horizon;
  return d;
}

/// Loads and validates; prints violations and returns false when inadmissible.
bool load_valid_model(const std::string& path, ModelSpec& model, std::ostream& err) {
  model = load_model(path);
  const auto violations = validate(model);
  if (violations.empty()) return true;
  err << "model '" << path << "' is invalid:\n";
  for (const auto& v : violations) err << "  " << v.code << " at " << v.where << ": " << v.message << '\n';
  return false;
}

struct GenerateArgs {
  int n = 1;
  Index dx = 3;
  Index du = 3;
  int horizon = 10;
  std::string range = "0,20";
  std::uint64_t seed = 0;
  double p = 0.5;
  std::string pd = "shift";
  bool shared_cost = false;
  std::string family = "gaussian";
  std::string out;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  RandomModelOptions opt;
  std::tie(opt.lo, opt.hi) = parse_range(a.range);
  opt.seed = a.seed;
  opt.p = a.p;
  opt.per_step_cost = !a.shared_cost;
  opt.pd = a.pd == "rejection" ? PdSampling::Rejection : PdSampling::DiagonalShift;
  opt.family = noise_family_from_string(a.family);
  const ModelSpec model = random_model(uniform_dims(a.n, a.dx, a.du, a.horizon), opt);
  save_model(a.out, model);
  out << "wrote " << a.out << " (model hash " << model_hash(model) << ")\n";
  return kExitOk;
}

struct SynthesizeArgs {
  std::string model;
  std::string out;
};

int cmd_synthesize(const SynthesizeArgs& a, std::ostream& out, std::ostream& err) {
  ModelSpec model;
  if (!load_valid_model(a.model, model, err)) return kExitValidation;
  RunManifest manifest;
  manifest.command = "synthesize";
  manifest.model_hash = model_hash(model);
  manifest.wall_clock["started_at"] = utc_timestamp();
  const auto start = Clock::now();
  const GainSchedule schedule = synthesize(model);
  manifest.wall_clock["synthesis_seconds"] = seconds_since(start);
  write_json_file(a.out, gains_to_json(schedule, manifest));
  out << "wrote " << a.out << " (horizon " << schedule.horizon() << ", model hash " << manifest.model_hash
      << ")\n";
  return kExitOk;
}

struct SimulateArgs {
  std::string model;
  std::string gains;
  std::uint64_t episodes = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string report;
  std::string noise;
  std::int64_t trace_limit = -1;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  ModelSpec model;
  if (!load_valid_model(a.model, model, err)) return kExitValidation;
  const LoadedGains gains = load_gains(a.gains);
  const std::string hash = model_hash(model);
  if (gains.manifest.model_hash != hash || !(gains.schedule.dims == model.dims)) {
    err << "gains '" << a.gains << "' were synthesized for model " << gains.manifest.model_hash
        << ", not " << hash << '\n';
    return kExitArtifactMismatch;
  }
  MonteCarloOptions mc;
  if (!a.noise.empty()) mc.simulation.sampler = make_sampler(noise_family_from_string(a.noise));

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.model_hash = hash;
  manifest.seeds = {a.seed};
  manifest.parameters = {{"episodes", a.episodes}, {"gains", a.gains},
                         {"noise", a.noise.empty() ? to_string(model.noise.family) : a.noise}};
  manifest.wall_clock["started_at"] = utc_timestamp();

  const auto start = Clock::now();
  const CostReport report = monte_carlo(model, gains.schedule, a.episodes, a.seed, mc);
  manifest.wall_clock["simulation_seconds"] = seconds_since(start);

  if (!a.out.empty()) {
    std::ofstream csv(a.out);
    if (!csv) throw FormatError("cannot write '" + a.out + "'");
    write_trace_csv_header(csv);
    const Simulator sim(model, optimal_policy(gains.schedule), mc.simulation);
    const std::uint64_t limit =
        a.trace_limit < 0 ? a.episodes : std::min<std::uint64_t>(a.episodes, static_cast<std::uint64_t>(a.trace_limit));
    for (std::uint64_t k = 0; k < limit; ++k) write_trace_csv(csv, k, model, sim.episode(a.seed, k));
  }

  Json doc = {{"format", "netlqr-report/1"},
              {"manifest", manifest.to_json()},
              {"mean_cost", report.mean},
              {"std_error", report.std_error},
              {"episodes", report.episodes},
              {"seed", report.seed},
              {"expected_optimal_cost", expected_initial_value(model, gains.schedule)}};
  const std::string report_path = !a.report.empty() ? a.report : (a.out.empty() ? "" : a.out + ".json");
  if (!report_path.empty()) write_json_file(report_path, doc);
  out << doc.dump(2) << '\n';
  return kExitOk;
}

struct VerifyArgs {
  std::string model;
  int random_n = 0;
  int seeds = 1;
  Index dx = 3;
  Index du = 3;
  int horizon = 10;
  std::string range = "0,20";
  double p = 0.5;
  int trials = 40;
  double epsilon = 1e-3;
  std::uint64_t seed = 0;
  std::uint64_t episodes = 0;
  std::string out;
  bool inject = false;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::string, ModelSpec>> models;
  if (!a.model.empty()) {
    ModelSpec model;
    if (!load_valid_model(a.model, model, err)) return kExitValidation;
    models.emplace_back(a.model, std::move(model));
  } else if (a.random_n > 0) {
    RandomModelOptions opt;
    std::tie(opt.lo, opt.hi) = parse_range(a.range);
    opt.p = a.p;
    for (int k = 0; k < a.seeds; ++k) {
      opt.seed = a.seed + static_cast<std::uint64_t>(k);
      models.emplace_back("random seed " + std::to_string(opt.seed),
                          random_model(uniform_dims(a.random_n, a.dx, a.du, a.horizon), opt));
    }
  } else {
    models.emplace_back("scalar test instance", scalar_test_instance());
  }

  VerifyOptions opt;
  opt.stationarity_trials = a.trials;
  opt.epsilon = a.epsilon;
  opt.seed = a.seed;
  opt.mc_episodes = a.episodes;
  opt.inject_gain_error = a.inject;

  RunManifest manifest;
  manifest.command = "verify";
  manifest.seeds = {a.seed};
  manifest.parameters = {{"trials", a.trials}, {"epsilon", a.epsilon}, {"episodes", a.episodes}};
  manifest.wall_clock["started_at"] = utc_timestamp();
  const auto start = Clock::now();

  bool passed = true;
  Json reports = Json::array();
  for (const auto& [label, model] : models) {
    const VerifyReport r = verify_model(model, opt, label);
    passed = passed && r.passed;
    Json rj = r.to_json();
    rj["model_hash"] = model_hash(model);
    reports.push_back(std::move(rj));
    for (const auto& c : r.checks) {
      out << (c.passed ? "PASS " : "FAIL ") << label << " :: " << c.name << " (metric " << c.metric
          << ", threshold " << c.threshold << ")\n";
    }
  }
  if (models.size() == 1) manifest.model_hash = model_hash(models.front().second);
  manifest.wall_clock["verify_seconds"] = seconds_since(start);
  Json doc = {{"format", "netlqr-verify/1"}, {"manifest", manifest.to_json()}, {"passed", passed},
              {"reports", reports}};
  if (!a.out.empty()) write_json_file(a.out, doc);
  out << (passed ? "verification passed" : "verification FAILED") << '\n';
  return passed ? kExitOk : kExitChecksFailed;
}

struct BenchmarkArgs {
  std::string n_list = "1,10,100";
  Index dx = 3;
  Index du = 3;
  int horizon = 1000;
  int trials = 10;
  std::uint64_t seed = 0;
  std::string range = "0,20";
  bool per_step_cost = false;
  std::uint64_t simulate_episodes = 0;
  std::string out = "benchmark.csv";
};

struct Timing {
  double total = 0.0;
  double lo = INFINITY;
  double hi = 0.0;
  void add(double s) {
    total += s;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
};

int cmd_benchmark(const BenchmarkArgs& a, std::ostream& out) {
  std::vector<int> ns;
  for (double v : parse_number_list(a.n_list, "--n-list")) {
    if (v < 1 || v != std::floor(v)) throw ValidationError("--n-list: entries must be positive integers");
    ns.push_back(static_cast<int>(v));
  }
  RandomModelOptions opt;
  std::tie(opt.lo, opt.hi) = parse_range(a.range);
  opt.per_step_cost = a.per_step_cost;
  opt.p = 0.5;

  std::ofstream csv(a.out);
  if (!csv) throw FormatError("cannot write '" + a.out + "'");
  csv << "N,mode,trials,mean_seconds,min_seconds,max_seconds\n";
  csv.precision(9);

  RunManifest manifest;
  manifest.command = "benchmark";
  manifest.seeds = {a.seed};
  manifest.parameters = {{"n_list", ns}, {"d_x", a.dx}, {"d_u", a.du}, {"horizon", a.horizon},
                         {"trials", a.trials}, {"entry_range", a.range}, {"per_step_cost", a.per_step_cost},
                         {"simulate_episodes", a.simulate_episodes}};
  manifest.wall_clock["started_at"] = utc_timestamp();

  for (int n : ns) {
    Timing decentralized, centralized, simulation;
    for (int k = 0; k < a.trials; ++k) {
      opt.seed = a.seed + 1000003ULL * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(k);
      const ModelSpec model = random_model(uniform_dims(n, a.dx, a.du, a.horizon), opt);

      // Scoped so that at most one large schedule is alive at a time.
      {
        auto start = Clock::now();
        const GainSchedule schedule = synthesize(model);
        decentralized.add(seconds_since(start));
        if (a.simulate_episodes > 0) {
          start = Clock::now();
          monte_carlo(model, schedule, a.simulate_episodes, opt.seed);
          simulation.add(seconds_since(start));
        }
      }
      {
        const auto start = Clock::now();
        const CentralizedGains central = centralized_lqr(model);
        centralized.add(seconds_since(start));
      }
    }
    auto row = [&](const char* mode, const Timing& tm) {
      csv << n << ',' << mode << ',' << a.trials << ',' << tm.total / a.trials << ',' << tm.lo << ',' << tm.hi
          << '\n';
    };
    row("decentralized", decentralized);
    row("centralized", centralized);
    if (a.simulate_episodes > 0) row("simulation", simulation);
    out << "N=" << n << " decentralized " << decentralized.total / a.trials << " s, centralized "
        << centralized.total / a.trials << " s, ratio " << decentralized.total / centralized.total << '\n';
  }
  write_json_file(a.out + ".manifest.json", manifest.to_json());
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"netlqr: optimal decentralized control over lossy uplinks"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a random model file");
  generate->add_option("--random-n", gen.n, "Number of subsystems")->check(CLI::PositiveNumber);
  generate->add_option("--d-x", gen.dx, "State dimension per subsystem");
  generate->add_option("--d-u", gen.du, "Action dimension per controller");
  generate->add_option("--t-horizon", gen.horizon, "Horizon T");
  generate->add_option("--entry-range", gen.range, "Uniform entry range lo,hi");
  generate->add_option("--seed", gen.seed, "Generation seed");
  generate->add_option("--p", gen.p, "Link failure probability");
  generate->add_option("--pd-method", gen.pd, "PD cost sampling: shift or rejection")
      ->check(CLI::IsMember({"shift", "rejection"}));
  generate->add_flag("--shared-cost", gen.shared_cost, "One R shared by every step");
  generate->add_option("--noise", gen.family, "Noise family: gaussian or uniform")
      ->check(CLI::IsMember({"gaussian", "uniform"}));
  generate->add_option("--out", gen.out, "Output model path")->required();

  SynthesizeArgs syn;
  auto* synth = app.add_subcommand("synthesize", "Compute the optimal gain schedule");
  synth->add_option("--model", syn.model, "Model file")->required();
  synth->add_option("--out", syn.out, "Output gains file")->required();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo evaluation of a gain schedule");
  simulate->add_option("--model", sim.model, "Model file")->required();
  simulate->add_option("--gains", sim.gains, "Gains file")->required();
  simulate->add_option("--episodes", sim.episodes, "Number of episodes")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_option("--out", sim.out, "Trace CSV path");
  simulate->add_option("--report", sim.report, "Report JSON path (default: <out>.json)");
  simulate->add_option("--noise", sim.noise, "Override noise family")->check(CLI::IsMember({"gaussian", "uniform"}));
  simulate->add_option("--trace-episodes", sim.trace_limit, "Episodes written to the CSV (default: all)");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Run the optimality and reduction checks");
  verify->add_option("--model", ver.model, "Model file (default: built-in scalar instance)");
  verify->add_option("--random-n", ver.random_n, "Verify random models with N subsystems");
  verify->add_option("--seeds", ver.seeds, "Number of random models");
  verify->add_option("--d-x", ver.dx, "State dimension for random models");
  verify->add_option("--d-u", ver.du, "Action dimension for random models");
  verify->add_option("--t-horizon", ver.horizon, "Horizon for random models");
  verify->add_option("--entry-range", ver.range, "Entry range for random models");
  verify->add_option("--p", ver.p, "Link failure probability for random models");
  verify->add_option("--trials", ver.trials, "Stationarity perturbations per model");
  verify->add_option("--epsilon", ver.epsilon, "Perturbation size");
  verify->add_option("--seed", ver.seed, "Seed");
  verify->add_option("--episodes", ver.episodes, "Monte Carlo episodes (0 skips)");
  verify->add_option("--out", ver.out, "Report JSON path");
  verify->add_flag("--inject-gain-error", ver.inject, "Test hook: corrupt K[0] before checking")
      ->group("");

  BenchmarkArgs bench;
  auto* benchmark = app.add_subcommand("benchmark", "Time decentralized vs centralized synthesis");
  benchmark->add_option("--n-list", bench.n_list, "Comma-separated subsystem counts");
  benchmark->add_option("--d-x", bench.dx, "State dimension per subsystem");
  benchmark->add_option("--d-u", bench.du, "Action dimension per controller");
  benchmark->add_option("--t-horizon", bench.horizon, "Horizon T");
  benchmark->add_option("--trials", bench.trials, "Random instances per N")->check(CLI::PositiveNumber);
  benchmark->add_option("--seed", bench.seed, "Seed");
  benchmark->add_option("--entry-range", bench.range, "Uniform entry range lo,hi");
  benchmark->add_flag("--per-step-cost", bench.per_step_cost, "Draw a fresh R_t for every step");
  benchmark->add_option("--simulate-episodes", bench.simulate_episodes, "Also time this many episodes");
  benchmark->add_option("--out", bench.out, "Timing CSV path");

  std::vector<std::string> argv_storage{"netlqr"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitChecksFailed;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, out);
    if (synth->parsed()) return cmd_synthesize(syn, out, err);
    if (simulate->parsed()) return cmd_simulate(sim, out, err);
    if (verify->parsed()) return cmd_verify(ver, out, err);
    if (benchmark->parsed()) return cmd_benchmark(bench, out);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ArtifactMismatch& e) {
    err << "artifact mismatch: " << e.what() << '\n';
    return kExitArtifactMismatch;
  } catch (const SingularityError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const GenerationError& e) {
    err << "generation failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitChecksFailed;
  }
  return kExitChecksFailed;
}

}  // namespace netlqr
