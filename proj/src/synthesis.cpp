#include "netlqr/synthesis.hpp"

#include <sstream>

#include "netlqr/errors.hpp"

namespace netlqr {

namespace {

void check_shapes(const Matrix& P, const Matrix& A, const Matrix& B, const Matrix& R22,
                  const Matrix& R12) {
  const Index nx = A.rows();
  if (A.cols() != nx || P.rows() != nx || P.cols() != nx || B.rows() != nx ||
      R22.rows() != B.cols() || R22.cols() != B.cols() || R12.rows() != nx ||
      R12.cols() != B.cols()) {
    throw DimensionError("omega/psi: inconsistent operand shapes");
  }
}

}  // namespace

RiccatiStep riccati_step(const Matrix& P, const Matrix& A, const Matrix& B, const Matrix& R11,
                         const Matrix& R22, const Matrix& R12, const std::string& context) {
  check_shapes(P, A, B, R22, R12);
  if (R11.rows() != A.rows() || R11.cols() != A.rows()) {
    throw DimensionError("omega: R11 shape does not match A");
  }
  const Matrix PA = P * A;
  const Matrix PB = P * B;
  const Matrix inner = R22 + B.transpose() * PB;
  const Matrix cross = R12.transpose() + B.transpose() * PA;  // R12ᵀ + BᵀPA
  RiccatiStep out;
  out.gain = -solve_pd(inner, cross, context);
  // (R12 + AᵀPB)·(−gain) = −crossᵀ·inner⁻¹·cross
  out.value = symmetrize(R11 + A.transpose() * PA + cross.transpose() * out.gain);
  return out;
}

Matrix omega(const Matrix& P, const Matrix& A, const Matrix& B, const Matrix& R11,
             const Matrix& R22, const Matrix& R12) {
  return riccati_step(P, A, B, R11, R22, R12, "omega").value;
}

Matrix psi(const Matrix& P, const Matrix& A, const Matrix& B, const Matrix& R22,
           const Matrix& R12) {
  check_shapes(P, A, B, R22, R12);
  const Matrix inner = R22 + B.transpose() * P * B;
  const Matrix cross = R12.transpose() + B.transpose() * P * A;
  return -solve_pd(inner, cross, "psi");
}

Matrix GainSchedule::P_block(int i, int t) const {
  const Index off = dims.x_offset(i);
  return P[t].block(off, off, dims.d_x[i], dims.d_x[i]);
}

GainSchedule synthesize(const ModelSpec& model) {
  const GlobalDynamics global = assemble_global(model);  // validates
  const Dims& dims = model.dims;
  const int T = dims.horizon;
  const int n = dims.n_subsystems();

  GainSchedule s;
  s.dims = dims;
  s.P.assign(T + 2, Matrix());
  s.K.assign(T + 1, Matrix());
  s.e.assign(T + 2, 0.0);
  s.Ptilde.assign(n, std::vector<Matrix>(T + 2));
  s.Ktilde.assign(n, std::vector<Matrix>(T + 1));

  s.P[T + 1] = Matrix::Zero(dims.total_x(), dims.total_x());
  for (int i = 0; i < n; ++i) s.Ptilde[i][T + 1] = Matrix::Zero(dims.d_x[i], dims.d_x[i]);

  for (int t = T; t >= 0; --t) {
    const CostBlocks cost(dims, model.cost(t));
    const std::string at = "synthesize: t=" + std::to_string(t);
    auto central = riccati_step(s.P[t + 1], global.A, global.B, cost.xx(), cost.uu(), cost.xu(),
                                at + " block=global");
    s.P[t] = std::move(central.value);
    s.K[t] = std::move(central.gain);

    double e = s.e[t + 1];
    for (int i = 0; i < n; ++i) {
      const double p = model.channel.p[i];
      const Matrix mixed = (1.0 - p) * s.P_block(i, t + 1) + p * s.Ptilde[i][t + 1];
      const auto& plant = model.plants[i];
      auto local = riccati_step(mixed, plant.A, plant.B_local, cost.xx_local(i),
                                cost.uu_local(i), cost.xu_local(i),
                                at + " block=subsystem " + std::to_string(i));
      s.Ptilde[i][t] = std::move(local.value);
      s.Ktilde[i][t] = std::move(local.gain);
      e += (mixed * model.noise.noise_cov(i, t)).trace();
    }
    s.e[t] = e;
  }
  return s;
}

double value_function(int t, const BeliefSummary& belief, const GainSchedule& schedule) {
  const Dims& dims = schedule.dims;
  const int n = dims.n_subsystems();
  if (t < 0 || t > dims.horizon + 1) throw DimensionError("value_function: t out of range");
  if (static_cast<int>(belief.mean.size()) != n || static_cast<int>(belief.cov.size()) != n) {
    throw DimensionError("value_function: belief must have one entry per subsystem");
  }
  Vector m(dims.total_x());
  double trace_terms = 0.0;
  for (int i = 0; i < n; ++i) {
    if (belief.mean[i].size() != dims.d_x[i] || belief.cov[i].rows() != dims.d_x[i] ||
        belief.cov[i].cols() != dims.d_x[i]) {
      throw DimensionError("value_function: belief block " + std::to_string(i) +
                           " has the wrong size");
    }
    m.segment(dims.x_offset(i), dims.d_x[i]) = belief.mean[i];
    trace_terms += (schedule.Ptilde[i][t] * belief.cov[i]).trace();
  }
  return m.dot(schedule.P[t] * m) + trace_terms + schedule.e[t];
}

double expected_initial_value(const ModelSpec& model, const GainSchedule& schedule) {
  const Dims& dims = model.dims;
  Vector mu(dims.total_x());
  double trace_terms = 0.0;
  for (int i = 0; i < dims.n_subsystems(); ++i) {
    const double p = model.channel.p[i];
    mu.segment(dims.x_offset(i), dims.d_x[i]) = model.noise.mu0[i];
    const Matrix weight = (1.0 - p) * schedule.P_block(i, 0) + p * schedule.Ptilde[i][0];
    trace_terms += (weight * model.noise.sigma0[i]).trace();
  }
  return mu.dot(schedule.P[0] * mu) + trace_terms + schedule.e[0];
}

BeliefSummary initial_belief(const ModelSpec& model) {
  return {model.noise.mu0, model.noise.sigma0};
}

}  // namespace netlqr
