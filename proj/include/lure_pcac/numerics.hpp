#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lure_pcac {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Throws std::invalid_argument with `what` when `cond` is false.
inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

/// Throws unless every entry of M is finite. `name` labels the offender.
void ensure_finite(const Matrix& M, const std::string& name);

/// Discrete-time state-space realization y = C (qI - A)^{-1} B u + D u.
struct StateSpaceRealization {
  Matrix A, B, C, D;

  StateSpaceRealization() = default;
  StateSpaceRealization(Matrix A_, Matrix B_, Matrix C_, Matrix D_);
  /// Strictly proper realization (D = 0).
  StateSpaceRealization(Matrix A_, Matrix B_, Matrix C_);

  Eigen::Index order() const { return A.rows(); }
  Eigen::Index inputs() const { return B.cols(); }
  Eigen::Index outputs() const { return C.rows(); }
};

/// All eigenvalues of a real square matrix, with multiplicity, via
/// Hessenberg reduction plus shifted QR. Ordering is unspecified.
/// Throws on non-square input or if the QR sweep fails to converge.
std::vector<Complex> eigenvalues(const Matrix& M);

/// max |lambda_i| over eigenvalues(M).
double spectral_radius(const Matrix& M);

/// Smallest eigenvalue of a Hermitian matrix. H is symmetrized as
/// (H + H^H)/2 first; asymmetry beyond `tol` is an error that reports the
/// offending magnitude.
double hermitian_min_eig(const ComplexMatrix& H, double tol = 1e-10);

/// C (e^{i psi} I - A)^{-1} B + D evaluated by a complex linear solve.
/// Throws if the resolvent is singular at psi.
ComplexMatrix freq_response(const StateSpaceRealization& ss, double psi);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// CDF of the F-distribution with (d1, d2) degrees of freedom.
double f_cdf(double d1, double d2, double x);

/// Quantile of the F-distribution: x with CDF_F(d1,d2)(x) = prob.
/// Bracketed Newton with bisection fallback, |residual| below 1e-10 in
/// the CDF domain. d1, d2 > 0 and prob in (0, 1) required.
double f_inv_cdf(double d1, double d2, double prob);

/// Numerical rank of the stacked observability matrix [C; CA; ...; CA^{n-1}],
/// SVD-based with tolerance max(rows, cols) * eps * sigma_max.
Eigen::Index observability_rank(const Matrix& A, const Matrix& C);

}  // namespace lure_pcac
