#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "lure_pcac/numerics.hpp"

namespace lure_pcac {

/// Weights for the receding-horizon quadratic cost. R1 and the terminal
/// weight are PSD, R2 is PD; all are step- and horizon-independent.
struct BpreConfig {
  Eigen::Index horizon = 1;  // ell >= 1
  Matrix R1;                 // nhat*p square, PSD
  Matrix R2;                 // m square, PD
  Matrix P_terminal;         // nhat*p square, PSD
  std::optional<Matrix> E1;  // optional factor with R1 = E1^T E1

  void validate(Eigen::Index state_dim, Eigen::Index input_dim) const;
};

/// Per-channel control magnitude limits. Defaults are unbounded.
struct SaturationLimits {
  double u_min = -std::numeric_limits<double>::infinity();
  double u_max = std::numeric_limits<double>::infinity();

  void validate() const { require(u_min < u_max, "saturation: u_min must be below u_max"); }
};

/// Optional instrumentation for the backward recursion.
struct RiccatiDiagnostics {
  std::vector<double> min_eigs;  // min eigenvalue of each P iterate
};

/// Backward recursion j = ell..2 of
///   P <- A^T P (A - B Gamma) + R1,  Gamma = (R2 + B^T P B)^{-1} B^T P A,
/// from P_terminal; returns K = -(R2 + B^T P B)^{-1} B^T P A using the
/// final iterate. Each P is re-symmetrized.
Matrix riccati_gain(const Matrix& A_m, const Matrix& B_m, const BpreConfig& config,
                    RiccatiDiagnostics* diagnostics = nullptr);

/// u_req = K x_m.
Vector control(const Matrix& K, const Vector& x_m);

/// Per-channel clamp to [u_min, u_max].
Vector saturate(const Vector& u_req, const SaturationLimits& limits);

/// Cost of a concrete control sequence over the horizon:
/// 1/2 sum_j (x_j^T R1 x_j + u_j^T R2 u_j) + 1/2 x_{ell+1}^T P_term x_{ell+1}
/// with x_1 = x_init and forward simulation of the prediction model.
double horizon_cost(const Matrix& A_m, const Matrix& B_m, const BpreConfig& config,
                    const Vector& x_init, const std::vector<Vector>& controls);

}  // namespace lure_pcac
