#include "lure_pcac/rls.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace lure_pcac {

void RlsConfig::validate() const {
  require(nhat >= 1, "rls: nhat must be at least 1");
  require(p >= 1 && m >= 1, "rls: dimensions must be positive");
  require(theta0.size() == dim(), "rls: theta0 length must be nhat*p*(m+p)");
  require(Psi0.rows() == dim() && Psi0.cols() == dim(), "rls: Psi0 shape mismatch");
  ensure_finite(Psi0, "Psi0");
  require((Psi0 - Psi0.transpose()).cwiseAbs().maxCoeff() <=
              1e-12 * std::max(1.0, Psi0.cwiseAbs().maxCoeff()),
          "rls: Psi0 must be symmetric");
  Eigen::LLT<Matrix> llt(Psi0);
  require(llt.info() == Eigen::Success, "rls: Psi0 must be positive definite");
  require(tau_d > p, "rls: tau_d must exceed p");
  require(tau_n >= p && tau_n < tau_d, "rls: tau_n must lie in [p, tau_d)");
  require(eta >= 0.0, "rls: eta must be nonnegative");
  require(alpha > 0.0 && alpha <= 1.0, "rls: alpha must be in (0, 1]");
  if (p > 1)
    require(tau_d > p + 3, "rls: tau_d must exceed p + 3 when p > 1");
}

namespace {

// Unbiased sample covariance of the trailing `count` window entries.
Matrix window_covariance(const std::deque<Vector>& errors, Eigen::Index count,
                         Eigen::Index p) {
  const Eigen::Index start = static_cast<Eigen::Index>(errors.size()) - count;
  Vector mean = Vector::Zero(p);
  for (Eigen::Index i = start; i < static_cast<Eigen::Index>(errors.size()); ++i)
    mean += errors[i];
  mean /= static_cast<double>(count);
  Matrix cov = Matrix::Zero(p, p);
  for (Eigen::Index i = start; i < static_cast<Eigen::Index>(errors.size()); ++i) {
    const Vector d = errors[i] - mean;
    cov += d * d.transpose();
  }
  return cov / static_cast<double>(count - 1);
}

}  // namespace

double forgetting_factor(const std::deque<Vector>& error_window, const RlsConfig& config,
                         bool* degenerate) {
  const Eigen::Index tau_n = config.tau_n, tau_d = config.tau_d, p = config.p;
  if (static_cast<Eigen::Index>(error_window.size()) < tau_d + 1) return 1.0;
  require(static_cast<Eigen::Index>(error_window.size()) == tau_d + 1,
          "forgetting_factor: window must hold exactly tau_d + 1 errors");
  if (config.eta == 0.0) return 1.0;

  const double tn = static_cast<double>(tau_n), td = static_cast<double>(tau_d);
  double g = 0.0;
  if (p == 1) {
    const double sd = window_covariance(error_window, tau_d + 1, 1)(0, 0);
    if (sd <= 0.0) {
      if (degenerate) *degenerate = true;
      return 1.0;
    }
    const double sn = window_covariance(error_window, tau_n + 1, 1)(0, 0);
    g = std::sqrt(sn / sd) - std::sqrt(f_inv_cdf(tn, td, 1.0 - config.alpha));
  } else {
    const double pd = static_cast<double>(p);
    const Matrix Sd = window_covariance(error_window, tau_d + 1, p);
    Eigen::FullPivLU<Matrix> lu(Sd);
    if (!lu.isInvertible()) {
      if (degenerate) *degenerate = true;
      return 1.0;
    }
    const Matrix Sn = window_covariance(error_window, tau_n + 1, p);
    const double tr = (Sn * lu.inverse()).trace();
    if (tr < 0.0) {
      if (degenerate) *degenerate = true;
      return 1.0;
    }
    const double a = (tn + td - pd - 1.0) * (td - 1.0) / ((td - pd - 3.0) * (td - pd));
    const double b = 4.0 + (pd * tn + 2.0) / (a - 1.0);
    const double c = pd * tn * (b - 2.0) / (b * (td - pd - 1.0));
    g = std::sqrt(tn / (c * td) * tr) - std::sqrt(f_inv_cdf(pd * tn, b, 1.0 - config.alpha));
  }
  return 1.0 + config.eta * std::max(g, 0.0);
}

RlsState::RlsState(RlsConfig config) : config_(std::move(config)) {
  config_.validate();
  theta_ = config_.theta0;
  psi_ = config_.Psi0;
}

Matrix RlsState::regressor(const IoHistory& history, Eigen::Index nhat,
                           Eigen::Index p, Eigen::Index m) {
  require(history.p() == p && history.m() == m, "regressor: history dimension mismatch");
  require(history.depth() >= nhat, "regressor: history too shallow");
  Eigen::RowVectorXd row(nhat * (p + m));
  for (Eigen::Index i = 0; i < nhat; ++i)
    row.segment(i * p, p) = -history.y(i).transpose();
  for (Eigen::Index i = 0; i < nhat; ++i)
    row.segment(nhat * p + i * m, m) = history.u(i).transpose();
  Matrix phi = Matrix::Zero(p, nhat * p * (m + p));
  for (Eigen::Index j = 0; j < row.size(); ++j)
    phi.block(0, j * p, p, p) = row(j) * Matrix::Identity(p, p);
  return phi;
}

double RlsState::update(const Vector& y_k, const Matrix& phi_k) {
  const Eigen::Index p = config_.p, d = config_.dim();
  require(y_k.size() == p, "rls update: y_k dimension mismatch");
  require(phi_k.rows() == p && phi_k.cols() == d, "rls update: phi_k shape mismatch");

  const Vector e_k = y_k - phi_k * theta_;
  errors_.push_back(e_k);
  if (static_cast<Eigen::Index>(errors_.size()) > config_.tau_d + 1)
    errors_.pop_front();

  const double beta = forgetting_factor(errors_, config_, &degenerate_seen_);

  const Matrix psi_phiT = psi_ * phi_k.transpose();            // d x p
  Matrix inner = phi_k * psi_phiT;                             // p x p
  inner.diagonal().array() += 1.0 / beta;
  Eigen::LDLT<Matrix> ldlt(inner);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw std::runtime_error("rls update: inner matrix not positive definite");
  const Matrix gain = ldlt.solve(psi_phiT.transpose());        // p x d
  psi_ = beta * (psi_ - psi_phiT * gain);
  psi_ = Matrix(0.5 * (psi_ + psi_.transpose().eval()));
  theta_ += psi_ * (phi_k.transpose() * e_k);
  ++steps_;
  return beta;
}

IdentifiedModel extract_model(const Vector& theta, Eigen::Index nhat,
                              Eigen::Index p, Eigen::Index m) {
  require(theta.size() == nhat * p * (m + p), "extract_model: length mismatch");
  IdentifiedModel model;
  model.nhat = nhat;
  model.p = p;
  model.m = m;
  model.F.reserve(nhat);
  model.G.reserve(nhat);
  // vec([F_1 ... F_nhat]) stacks columns of the concatenated p x nhat*p block row.
  Eigen::Map<const Matrix> Fcat(theta.data(), p, nhat * p);
  Eigen::Map<const Matrix> Gcat(theta.data() + nhat * p * p, p, nhat * m);
  for (Eigen::Index i = 0; i < nhat; ++i) {
    model.F.push_back(Fcat.middleCols(i * p, p));
    model.G.push_back(Gcat.middleCols(i * m, m));
  }
  return model;
}

IdentifiedModel RlsState::extract_model() const {
  IdentifiedModel model = lure_pcac::extract_model(theta_, config_.nhat, config_.p, config_.m);
  model.step_tag = steps_;
  return model;
}

}  // namespace lure_pcac
