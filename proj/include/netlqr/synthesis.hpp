#pragma once

#include <string>
#include <vector>

#include "netlqr/model.hpp"

namespace netlqr {

/// Ω(P, A, B, R11, R22, R12) =
///   R11 + AᵀPA − (R12 + AᵀPB)(R22 + BᵀPB)⁻¹(R12ᵀ + BᵀPA), symmetrized.
Matrix omega(const Matrix& P, const Matrix& A, const Matrix& B, const Matrix& R11,
             const Matrix& R22, const Matrix& R12);

/// Ψ(P, A, B, R22, R12) = −(R22 + BᵀPB)⁻¹(R12ᵀ + BᵀPA).
Matrix psi(const Matrix& P, const Matrix& A, const Matrix& B, const Matrix& R22,
           const Matrix& R12);

/// Ω and Ψ from one factorization of the inner matrix.
struct RiccatiStep {
  Matrix value;  // Ω
  Matrix gain;   // Ψ
};

RiccatiStep riccati_step(const Matrix& P, const Matrix& A, const Matrix& B, const Matrix& R11,
                         const Matrix& R22, const Matrix& R12,
                         const std::string& context = "riccati_step");

/// Synthesized controller and value-function coefficients.
///
/// P and e have T+2 entries (t = 0..T+1), K has T+1 (t = 0..T).
/// Ptilde[i] / Ktilde[i] follow the same indexing per subsystem i.
struct GainSchedule {
  Dims dims;
  std::vector<Matrix> P;
  std::vector<Matrix> K;
  std::vector<std::vector<Matrix>> Ptilde;
  std::vector<std::vector<Matrix>> Ktilde;
  std::vector<double> e;

  int horizon() const { return dims.horizon; }

  /// n-th diagonal block of P[t].
  Matrix P_block(int i, int t) const;
};

/// Backward pass of the coupled recursions; throws SingularityError naming
/// (t, block) if an inner solve fails and ValidationError on invalid models.
GainSchedule synthesize(const ModelSpec& model);

/// Per-subsystem belief mean and covariance.
struct BeliefSummary {
  std::vector<Vector> mean;
  std::vector<Matrix> cov;
};

/// V_t(belief) = mᵀP[t]m + Σ_i tr(P̃[i][t]·S[i]) + e[t].
double value_function(int t, const BeliefSummary& belief, const GainSchedule& schedule);

/// Optimal expected total cost: V_0 averaged over the t=0 uplink outcome.
///
/// When link i succeeds at t=0 the belief collapses onto X_0^i, otherwise
/// it stays at (μ0, Σ0). Independence across links gives
/// μ0ᵀP0μ0 + Σ_i ((1−p_i) tr(P0^{ii}Σ0_i) + p_i tr(P̃0_i Σ0_i)) + e_0.
double expected_initial_value(const ModelSpec& model, const GainSchedule& schedule);

/// The prior belief (μ0, Σ0) of a model.
BeliefSummary initial_belief(const ModelSpec& model);

}  // namespace netlqr
