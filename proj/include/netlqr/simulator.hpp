#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "netlqr/controller.hpp"
#include "netlqr/rng.hpp"

namespace netlqr {

/// Source of standardized noise: zero mean, identity covariance.
///
/// The simulator colours a draw with a symmetric square root of the target
/// covariance, so any zero-mean unit-variance law with independent
/// components plugs in here.
class NoiseSampler {
 public:
  virtual ~NoiseSampler() = default;
  virtual Vector standard(Index d, Rng& rng) const = 0;
};

class GaussianSampler final : public NoiseSampler {
 public:
  Vector standard(Index d, Rng& rng) const override;
};

/// Independent components uniform on [−√3, √3].
class UniformSampler final : public NoiseSampler {
 public:
  Vector standard(Index d, Rng& rng) const override;
};

/// Sampler for a built-in family; Custom has no built-in and throws.
std::shared_ptr<const NoiseSampler> make_sampler(NoiseFamily family);

/// Γ per link: 1 with probability 1 − p, 0 with probability p.
std::vector<std::uint8_t> sample_channel(const ChannelSpec& channel, Rng& rng);

/// x' = A·x + B_local·u + B_remote·u0 + w for subsystem i.
Vector step_plant(const ModelSpec& model, int i, const Vector& x, const Vector& u, const Vector& u0,
                  const Vector& w);

/// Channel outcomes fixed in advance, gamma[t][i].
struct ChannelSchedule {
  std::vector<std::vector<std::uint8_t>> gamma;
};

struct EpisodeStep {
  Vector x;     // stacked true state
  Vector xhat;  // stacked common estimate
  std::vector<std::uint8_t> gamma;
  Vector u0;
  Vector ubar;  // stacked mean local actions
  Vector u;     // stacked applied local actions
  double cost = 0.0;
};

struct EpisodeTrace {
  std::vector<EpisodeStep> steps;  // t = 0..T
  Vector x_final;                  // X_{T+1}, not costed
  double total_cost = 0.0;
};

struct SimulationOptions {
  std::shared_ptr<const NoiseSampler> sampler;  // defaults to the model's family
  std::optional<ChannelSchedule> forced_channel;
};

/// Closed-loop rollout engine.
///
/// Episode k under master seed s draws from three substreams of (s, k):
/// the initial state, the channel, and the process noise. Changing the
/// policy or forcing the channel therefore leaves the other draws untouched.
class Simulator {
 public:
  Simulator(const ModelSpec& model, Policy policy, SimulationOptions options = {});

  EpisodeTrace episode(std::uint64_t seed, std::uint64_t index) const;

  const ModelSpec& model() const { return model_; }

 private:
  const ModelSpec& model_;
  Policy policy_;
  SimulationOptions options_;
  std::vector<Matrix> init_factor_;
  std::vector<std::vector<Matrix>> noise_factor_;
};

EpisodeTrace simulate_episode(const ModelSpec& model, const GainSchedule& schedule,
                              std::uint64_t seed, const SimulationOptions& options = {});

struct CostReport {
  double mean = 0.0;
  double std_error = 0.0;  // sample std / √M, 0 when M = 1
  std::uint64_t episodes = 0;
  std::uint64_t seed = 0;
  std::vector<double> per_step_mean;  // filled when requested
};

struct MonteCarloOptions {
  SimulationOptions simulation;
  bool per_step_profile = false;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// M independent episodes 0..M−1 under `seed`; the reduction runs in index order.
CostReport monte_carlo(const ModelSpec& model, const Policy& policy, std::uint64_t episodes,
                       std::uint64_t seed, const MonteCarloOptions& options = {});

CostReport monte_carlo(const ModelSpec& model, const GainSchedule& schedule,
                       std::uint64_t episodes, std::uint64_t seed,
                       const MonteCarloOptions& options = {});

/// Problems found in a trace: estimate not equal to the state on a
/// successful step, total ≠ Σ stage costs, or a stage cost that disagrees
/// with SᵀRS or is negative beyond rounding.
std::vector<std::string> check_trace(const ModelSpec& model, const EpisodeTrace& trace);

/// Long-format CSV: one row per (episode, t, subsystem); subsystem 0 carries
/// the remote action. Vector cells are space-separated.
void write_trace_csv_header(std::ostream& out);
void write_trace_csv(std::ostream& out, std::uint64_t episode, const ModelSpec& model,
                     const EpisodeTrace& trace);

}  // namespace netlqr
