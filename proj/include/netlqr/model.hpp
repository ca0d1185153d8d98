#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "netlqr/linalg.hpp"
#include "netlqr/rng.hpp"

namespace netlqr {

// Subsystems are indexed 0..N-1 throughout the code. The remote controller
// has its own action block `u0`; stacked actions are ordered (u0, u_1..u_N).

struct Dims {
  std::vector<Index> d_x;  // per subsystem
  Index d_u0 = 1;          // remote controller
  std::vector<Index> d_u;  // per local controller
  int horizon = 0;         // T; steps run t = 0..T

  int n_subsystems() const { return static_cast<int>(d_x.size()); }
  Index total_x() const;
  Index total_u() const;
  Index x_offset(int i) const;
  /// Row offset of local action i inside the stacked (u0, u_1..u_N) vector.
  Index u_offset(int i) const;

  bool operator==(const Dims&) const = default;
};

struct PlantBlock {
  Matrix A;         // d_x × d_x
  Matrix B_local;   // d_x × d_u
  Matrix B_remote;  // d_x × d_u0

  bool operator==(const PlantBlock& o) const {
    return A == o.A && B_local == o.B_local && B_remote == o.B_remote;
  }
};

enum class NoiseFamily { Gaussian, Uniform, Custom };

std::string to_string(NoiseFamily family);
NoiseFamily noise_family_from_string(const std::string& s);

struct NoiseSpec {
  std::vector<Vector> mu0;
  std::vector<Matrix> sigma0;
  /// sigma_w[i] has either one entry (shared by every step) or T+1 entries.
  std::vector<std::vector<Matrix>> sigma_w;
  NoiseFamily family = NoiseFamily::Gaussian;

  const Matrix& noise_cov(int i, int t) const {
    const auto& seq = sigma_w[i];
    return seq.size() == 1 ? seq.front() : seq[t];
  }

  bool operator==(const NoiseSpec&) const;
};

struct ChannelSpec {
  std::vector<double> p;  // link failure probability per uplink

  bool operator==(const ChannelSpec&) const = default;
};

/// A full problem instance: plants, stage costs, noise and channel.
///
/// `costs` holds either a single R shared by every step or one R_t per step
/// t = 0..T. Each R is square of size total_x + total_u and acts on the
/// stacked vector (x_1..x_N, u0, u_1..u_N).
struct ModelSpec {
  Dims dims;
  std::vector<PlantBlock> plants;
  std::vector<Matrix> costs;
  NoiseSpec noise;
  ChannelSpec channel;

  int horizon() const { return dims.horizon; }
  int n_subsystems() const { return dims.n_subsystems(); }
  const Matrix& cost(int t) const { return costs.size() == 1 ? costs.front() : costs[t]; }

  bool operator==(const ModelSpec&) const;
};

/// Read-only view of the named sub-blocks of a stage cost matrix.
class CostBlocks {
 public:
  CostBlocks(const Dims& dims, const Matrix& r) : dims_(dims), r_(r) {}

  Matrix xx() const;
  Matrix xu() const;
  Matrix uu() const;
  /// R^{X^i X^i}, R^{X^i U^i}, R^{U^i U^i} for local controller i.
  Matrix xx_local(int i) const;
  Matrix xu_local(int i) const;
  Matrix uu_local(int i) const;

 private:
  const Dims& dims_;
  const Matrix& r_;
};

struct Violation {
  std::string code;
  std::string where;
  std::string message;
};

/// Every invariant violation of `model`; empty iff admissible.
///
/// Codes: dims_invalid, dim_mismatch, count_mismatch, non_finite,
/// not_symmetric, R_not_PSD, RUU_not_PD, cov_not_PSD, prob_out_of_range.
std::vector<Violation> validate(const ModelSpec& model);

/// Throws ValidationError listing the violations if the model is not admissible.
void require_valid(const ModelSpec& model);

/// Replaces every cost and covariance matrix by its symmetric part.
void symmetrize_in_place(ModelSpec& model);

struct GlobalDynamics {
  Matrix A;  // block diagonal
  Matrix B;  // columns ordered (u0, u_1..u_N)
};

GlobalDynamics assemble_global(const ModelSpec& model);

enum class PdSampling {
  /// Sample the free entries and retry until PD, at most kPdRetryCap times.
  Rejection,
  /// Sample the free entries once and lift the diagonal if λ_min is too small.
  DiagonalShift,
};

inline constexpr int kPdRetryCap = 10000;

struct RandomModelOptions {
  double lo = 0.0;
  double hi = 20.0;
  std::uint64_t seed = 0;
  double p = 0.5;                  // failure probability for every link
  bool per_step_cost = true;       // false: one R shared by all steps
  PdSampling pd = PdSampling::DiagonalShift;
  NoiseFamily family = NoiseFamily::Gaussian;
};

/// Random instance: A/B entries i.i.d. uniform on [lo, hi], PD costs,
/// zero-mean identity-covariance initial state and noise.
ModelSpec random_model(const Dims& dims, const RandomModelOptions& options);

/// One symmetric PD matrix from the upper-triangle sampling procedure.
Matrix random_pd_matrix(Index d, double lo, double hi, PdSampling method, Rng& rng,
                        const std::string& context);

/// Scalar test instance used across the tests and the verify command:
/// N=1, all dimensions 1, A=1, B=[1 1], R=I₃, p=0.5, T=2, μ0=1, Σ0=1, Σw=1.
ModelSpec scalar_test_instance();

}  // namespace netlqr
