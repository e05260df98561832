#include "lure_pcac/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace lure_pcac {

void ensure_finite(const Matrix& M, const std::string& name) {
  if (!M.allFinite())
    throw std::invalid_argument(name + " contains a non-finite entry");
}

StateSpaceRealization::StateSpaceRealization(Matrix A_, Matrix B_, Matrix C_, Matrix D_)
    : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)), D(std::move(D_)) {
  require(A.rows() == A.cols(), "state matrix must be square");
  require(B.rows() == A.rows(), "B row count must match state order");
  require(C.cols() == A.rows(), "C column count must match state order");
  require(D.rows() == C.rows() && D.cols() == B.cols(), "D shape mismatch");
  ensure_finite(A, "A");
  ensure_finite(B, "B");
  ensure_finite(C, "C");
  ensure_finite(D, "D");
}

StateSpaceRealization::StateSpaceRealization(Matrix A_, Matrix B_, Matrix C_) {
  Matrix D_ = Matrix::Zero(C_.rows(), B_.cols());
  *this = StateSpaceRealization(std::move(A_), std::move(B_), std::move(C_), std::move(D_));
}

std::vector<Complex> eigenvalues(const Matrix& M) {
  require(M.rows() == M.cols(), "eigenvalues: matrix must be square");
  ensure_finite(M, "eigenvalues input");
  if (M.rows() == 0) return {};
  Eigen::EigenSolver<Matrix> solver;
  solver.setMaxIterations(static_cast<int>(30 * M.rows()));
  solver.compute(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigenvalues: QR iteration did not converge");
  std::vector<Complex> out(M.rows());
  for (Eigen::Index i = 0; i < M.rows(); ++i) out[i] = solver.eigenvalues()(i);
  return out;
}

double spectral_radius(const Matrix& M) {
  double r = 0.0;
  for (const Complex& ev : eigenvalues(M)) r = std::max(r, std::abs(ev));
  return r;
}

double hermitian_min_eig(const ComplexMatrix& H, double tol) {
  require(H.rows() == H.cols(), "hermitian_min_eig: matrix must be square");
  const double asym = (H - H.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol)
    throw std::invalid_argument("hermitian_min_eig: max asymmetry " +
                                std::to_string(asym) + " exceeds tolerance");
  ComplexMatrix S = 0.5 * (H + H.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(S, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_min_eig: eigensolve failed");
  return solver.eigenvalues().minCoeff();
}

ComplexMatrix freq_response(const StateSpaceRealization& ss, double psi) {
  const Eigen::Index n = ss.order();
  const Complex z = std::polar(1.0, psi);
  ComplexMatrix R = -ss.A.cast<Complex>();
  R.diagonal().array() += z;
  Eigen::PartialPivLU<ComplexMatrix> lu(R);
  // PartialPivLU has no singularity signal; check the residual instead.
  ComplexMatrix X = lu.solve(ss.B.cast<Complex>());
  const double resid = (R * X - ss.B.cast<Complex>()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, ss.B.cwiseAbs().maxCoeff());
  if (!X.allFinite() || resid > 1e-6 * scale)
    throw std::runtime_error("freq_response: resolvent singular at psi = " +
                             std::to_string(psi));
  return ss.C.cast<Complex>() * X + ss.D.cast<Complex>();
}

namespace {

// Continued fraction for the incomplete beta function, modified Lentz.
double beta_cont_frac(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw std::runtime_error("incomplete_beta: continued fraction did not converge");
}

double f_pdf(double d1, double d2, double x) {
  if (x <= 0.0) return 0.0;
  const double a = 0.5 * d1, b = 0.5 * d2;
  const double logb = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double lp = a * std::log(d1 / d2) + (a - 1.0) * std::log(x) -
                    (a + b) * std::log1p(d1 * x / d2) - logb;
  return std::exp(lp);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  require(a > 0.0 && b > 0.0, "incomplete_beta: a, b must be positive");
  require(x >= 0.0 && x <= 1.0, "incomplete_beta: x must be in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * beta_cont_frac(a, b, x) / a;
  return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

double f_cdf(double d1, double d2, double x) {
  require(d1 > 0.0 && d2 > 0.0, "f_cdf: degrees of freedom must be positive");
  if (x <= 0.0) return 0.0;
  return incomplete_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

double f_inv_cdf(double d1, double d2, double prob) {
  require(d1 > 0.0 && d2 > 0.0, "f_inv_cdf: degrees of freedom must be positive");
  require(prob > 0.0 && prob < 1.0, "f_inv_cdf: prob must be in (0, 1)");

  double lo = 0.0, hi = 1.0;
  while (f_cdf(d1, d2, hi) < prob) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("f_inv_cdf: bracket overflow");
  }
  // Bracketed Newton; the bracket keeps shrinking so the result lands within
  // a few ulps of the CDF sign change regardless of the tail flatness.
  double x = 0.5 * (lo + hi);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 300; ++it) {
    const double fx = f_cdf(d1, d2, x) - prob;
    if (fx > 0.0) hi = x; else lo = x;
    if (hi - lo <= 4.0 * eps * hi + 1e-300) break;
    const double dfx = f_pdf(d1, d2, x);
    double next = (dfx > 0.0) ? x - fx / dfx : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // Newton left the bracket
    x = next;
  }
  return 0.5 * (lo + hi);
}

Eigen::Index observability_rank(const Matrix& A, const Matrix& C) {
  require(A.rows() == A.cols(), "observability_rank: A must be square");
  require(C.cols() == A.rows(), "observability_rank: C column count mismatch");
  const Eigen::Index n = A.rows();
  Matrix obs(C.rows() * n, n);
  Matrix CAk = C;
  for (Eigen::Index i = 0; i < n; ++i) {
    obs.middleRows(i * C.rows(), C.rows()) = CAk;
    if (i + 1 < n) CAk = CAk * A;
  }
  Eigen::JacobiSVD<Matrix> svd(obs);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double tol = static_cast<double>(std::max(obs.rows(), obs.cols())) *
                     std::numeric_limits<double>::epsilon() * sv(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return rank;
}

}  // namespace lure_pcac
