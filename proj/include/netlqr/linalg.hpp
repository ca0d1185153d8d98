#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>

namespace netlqr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Eigenvalue tolerances used by every definiteness check.
inline constexpr double kTolPd = 1e-9;
inline constexpr double kTolPsd = -1e-9;

/// Largest admissible condition number for the PD solves in the recursions.
inline constexpr double kConditionCap = 1e12;

/// (M + Mᵀ) / 2.
Matrix symmetrize(const Matrix& m);

/// Smallest eigenvalue of the symmetric part of `m`.
double min_symmetric_eigenvalue(const Matrix& m);

bool is_psd(const Matrix& m, double tol = kTolPsd);
bool is_pd(const Matrix& m, double tol = kTolPd);

/// Symmetric square root factor F with F·Fᵀ = cov; tolerates singular PSD input.
Matrix psd_factor(const Matrix& cov);

/// Solves H·X = rhs for symmetric PD H via Cholesky.
///
/// Throws SingularityError if H is not numerically PD or its estimated
/// condition number exceeds kConditionCap. `context` is included in the
/// message so callers can name the time step and block.
Matrix solve_pd(const Matrix& h, const Matrix& rhs, const std::string& context);

/// Sum of values in index order by recursive halving.
double pairwise_sum(std::span<const double> values);

/// True iff every entry is finite.
bool all_finite(const Matrix& m);

}  // namespace netlqr
