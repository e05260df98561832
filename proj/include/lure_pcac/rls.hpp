#pragma once

#include <deque>
#include <optional>

#include "lure_pcac/bocf.hpp"
#include "lure_pcac/numerics.hpp"

namespace lure_pcac {

/// Hyperparameters for recursive least squares with variable-rate
/// forgetting driven by an F-test on windowed prediction-error statistics.
struct RlsConfig {
  Eigen::Index nhat = 1;        // model order
  Eigen::Index p = 1;           // output dimension
  Eigen::Index m = 1;           // input dimension
  Vector theta0;                // initial coefficients, nhat*p*(m+p)
  Matrix Psi0;                  // initial SPD matrix, same square dimension
  Eigen::Index tau_n = 40;      // numerator window
  Eigen::Index tau_d = 200;     // denominator window
  double eta = 0.1;             // forgetting gain; zero disables forgetting
  double alpha = 0.001;         // significance level

  Eigen::Index dim() const { return nhat * p * (m + p); }
  void validate() const;
};

/// beta for one step given the identification-error window, newest last.
/// Returns 1 while the window holds fewer than tau_d + 1 errors (the step
/// count is below tau_d). Degenerate statistics (zero denominator variance,
/// singular denominator covariance) suppress forgetting and set *degenerate.
double forgetting_factor(const std::deque<Vector>& error_window, const RlsConfig& config,
                         bool* degenerate = nullptr);

/// Running state of one identification stream. Single-owner mutable.
class RlsState {
 public:
  explicit RlsState(RlsConfig config);

  /// phi_k = [-y_{k-1}^T ... -y_{k-nhat}^T  u_{k-1}^T ... u_{k-nhat}^T] (x) I_p.
  static Matrix regressor(const IoHistory& history, Eigen::Index nhat,
                          Eigen::Index p, Eigen::Index m);

  /// One identification step with measurement y_k and regressor phi_k:
  /// appends e_k(theta_k), computes beta_k, updates Psi and theta.
  /// Returns beta_k.
  double update(const Vector& y_k, const Matrix& phi_k);

  /// Current coefficients reshaped into F/G blocks. `step_tag` is stamped
  /// with the number of updates performed (the k+1 generation index).
  IdentifiedModel extract_model() const;

  const Vector& theta() const { return theta_; }
  const Matrix& psi() const { return psi_; }
  long steps() const { return steps_; }
  bool degenerate_statistics_seen() const { return degenerate_seen_; }
  const RlsConfig& config() const { return config_; }

 private:
  RlsConfig config_;
  Vector theta_;
  Matrix psi_;
  std::deque<Vector> errors_;  // last tau_d + 1 identification errors
  long steps_ = 0;
  bool degenerate_seen_ = false;
};

/// Reshapes a coefficient vector into model blocks; the first nhat*p*p
/// entries un-vectorize (column stacking) into [F_1 ... F_nhat], the rest
/// into [G_1 ... G_nhat].
IdentifiedModel extract_model(const Vector& theta, Eigen::Index nhat,
                              Eigen::Index p, Eigen::Index m);

}  // namespace lure_pcac
