#include "lure_pcac/bpre.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace lure_pcac {

namespace {

void require_psd(const Matrix& M, const std::string& name) {
  require((M - M.transpose()).cwiseAbs().maxCoeff() <=
              1e-10 * std::max(1.0, M.cwiseAbs().maxCoeff()),
          name + " must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  require(es.eigenvalues().minCoeff() >= -1e-10, name + " must be positive semidefinite");
}

}  // namespace

void BpreConfig::validate(Eigen::Index state_dim, Eigen::Index input_dim) const {
  require(horizon >= 1, "bpre: horizon must be at least 1");
  require(R1.rows() == state_dim && R1.cols() == state_dim, "bpre: R1 shape mismatch");
  require(R2.rows() == input_dim && R2.cols() == input_dim, "bpre: R2 shape mismatch");
  require(P_terminal.rows() == state_dim && P_terminal.cols() == state_dim,
          "bpre: terminal weight shape mismatch");
  require_psd(R1, "R1");
  require_psd(P_terminal, "P_terminal");
  Eigen::LLT<Matrix> llt(R2);
  require(llt.info() == Eigen::Success, "bpre: R2 must be positive definite");
  if (E1.has_value()) {
    require(E1->cols() == state_dim, "bpre: E1 column count mismatch");
    require((E1->transpose() * (*E1) - R1).cwiseAbs().maxCoeff() <= 1e-10,
            "bpre: E1^T E1 must equal R1");
  }
}

Matrix riccati_gain(const Matrix& A_m, const Matrix& B_m, const BpreConfig& config,
                    RiccatiDiagnostics* diagnostics) {
  require(A_m.rows() == A_m.cols(), "riccati_gain: A must be square");
  require(B_m.rows() == A_m.rows(), "riccati_gain: B row count mismatch");
  config.validate(A_m.rows(), B_m.cols());

  Matrix P = config.P_terminal;
  auto record = [&](const Matrix& M) {
    if (!diagnostics) return;
    Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
    diagnostics->min_eigs.push_back(es.eigenvalues().minCoeff());
  };
  record(P);

  auto gain_from = [&](const Matrix& Pnext) -> Matrix {
    Matrix S = config.R2 + B_m.transpose() * Pnext * B_m;
    Eigen::LLT<Matrix> llt(0.5 * (S + S.transpose()));
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("riccati_gain: R2 + B^T P B not positive definite");
    return llt.solve(B_m.transpose() * Pnext * A_m);  // Gamma, m x n
  };

  for (Eigen::Index j = config.horizon; j >= 2; --j) {
    const Matrix Gamma = gain_from(P);
    P = A_m.transpose() * P * (A_m - B_m * Gamma) + config.R1;
    P = Matrix(0.5 * (P + P.transpose().eval()));
    record(P);
  }
  return -gain_from(P);
}

Vector control(const Matrix& K, const Vector& x_m) {
  require(K.cols() == x_m.size(), "control: gain/state dimension mismatch");
  return K * x_m;
}

Vector saturate(const Vector& u_req, const SaturationLimits& limits) {
  limits.validate();
  Vector u = u_req;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    u(i) = std::min(std::max(u(i), limits.u_min), limits.u_max);
  return u;
}

double horizon_cost(const Matrix& A_m, const Matrix& B_m, const BpreConfig& config,
                    const Vector& x_init, const std::vector<Vector>& controls) {
  config.validate(A_m.rows(), B_m.cols());
  require(static_cast<Eigen::Index>(controls.size()) == config.horizon,
          "horizon_cost: need exactly `horizon` controls");
  require(x_init.size() == A_m.rows(), "horizon_cost: state dimension mismatch");
  Vector x = x_init;
  double cost = 0.0;
  for (const Vector& u : controls) {
    require(u.size() == B_m.cols(), "horizon_cost: control dimension mismatch");
    cost += 0.5 * (x.dot(config.R1 * x) + u.dot(config.R2 * u));
    x = A_m * x + B_m * u;
  }
  cost += 0.5 * x.dot(config.P_terminal * x);
  return cost;
}

}  // namespace lure_pcac
