#include "netlqr/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

#include "netlqr/errors.hpp"

namespace netlqr {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double min_symmetric_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool is_psd(const Matrix& m, double tol) { return min_symmetric_eigenvalue(m) >= tol; }

bool is_pd(const Matrix& m, double tol) { return min_symmetric_eigenvalue(m) >= tol; }

Matrix psd_factor(const Matrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(cov));
  Vector root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().transpose();
}

Matrix solve_pd(const Matrix& h, const Matrix& rhs, const std::string& context) {
  const Matrix hs = symmetrize(h);
  Eigen::LLT<Matrix> llt(hs);
  if (llt.info() != Eigen::Success) {
    throw SingularityError(context + ": inner matrix is not positive definite");
  }
  const double rcond = llt.rcond();
  if (!(rcond > 0.0) || 1.0 / rcond > kConditionCap) {
    std::ostringstream msg;
    msg << context << ": inner matrix condition estimate " << (rcond > 0.0 ? 1.0 / rcond : INFINITY)
        << " exceeds cap " << kConditionCap;
    throw SingularityError(msg.str());
  }
  Matrix x = llt.solve(rhs);
  x += llt.solve(rhs - hs * x);  // one refinement step
  return x;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace netlqr
