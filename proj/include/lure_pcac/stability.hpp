#pragma once

#include "lure_pcac/bocf.hpp"
#include "lure_pcac/lure.hpp"
#include "lure_pcac/numerics.hpp"

namespace lure_pcac {

/// Output-feedback compensator realization reconstructed from the
/// identified model and the receding-horizon gain:
///   A_c = A_m - F C_m + B_m K,  B_c = F,  C_c = K,
/// where F stacks the negated model F-blocks (the first block column of A_m).
struct ControllerRealization {
  Matrix A_c, B_c, C_c;
  Matrix F;  // nhat*p x p
  Matrix K;  // m x nhat*p
};

/// Closed interconnection of plant and controller in positive feedback,
/// realizing Gtilde = G (I - G_c G)^{-1}:
///   Atilde = [[A, B C_c], [B_c C, A_c]], Btilde = [B; 0], Ctilde = [C, 0].
struct ModifiedLure {
  StateSpaceRealization ss;
  Eigen::Index plant_order = 0;
};

/// Sector and multiplier data attached to a nonlinearity.
struct SectorSpec {
  Matrix K1, K2;   // m x p sector bounds with K2 - K1 symmetric PD
  Matrix kappa;    // m x m, Tsypkin sector [0, kappa] after the loop shift
  double K_L = 0;  // scalar loop transformation gain
  Matrix N;        // positive diagonal m x m multiplier

  void validate() const;
};

/// Per-step certificate values. Pass flags are pure functions of the
/// stored scalars.
struct StabilityReport {
  long k = 0;
  double alpha_cc = 0.0;
  double beta_cc = 0.0;
  bool cc_pass = false;
  double zeta1 = 0.0;
  Eigen::Index zeta2 = 0;
  double zeta3_min_eig = 0.0;
  double alpha_tc = 0.0;
  double beta_tc = 0.0;
  bool tc_pass = false;
  Eigen::Index grid_size = 0;
  bool approximate = false;      // grid points skipped (singular resolvent)
  bool tilde_singular = false;   // A_KL singular: zeta1/zeta2 undefined
};

constexpr double kZeta1Tolerance = 1e-10;

ControllerRealization controller_realization(const Matrix& A_m, const Matrix& B_m,
                                             const Matrix& C_m, const IdentifiedModel& model,
                                             const Matrix& K);

ModifiedLure modified_lure(const LurePlant& plant, const ControllerRealization& ctrl);

/// Gtilde / (I + K_L Gtilde): same B and C, A shifted by -B K_L C.
ModifiedLure loop_transform(const ModifiedLure& tilde, double K_L);

/// Circle-criterion values for the sector [K1, K2]:
/// alpha = spectral radius of the realization of
/// H = (I - K2 Gtilde)(I - K1 Gtilde)^{-1}; beta = grid minimum over
/// [0, pi] of the smallest eigenvalue of H + H^H. Singular grid points are
/// skipped and flagged via `approximate`.
struct CircleResult {
  double alpha = 0.0;
  double beta = 0.0;
  bool approximate = false;
};
CircleResult circle_criterion(const ModifiedLure& tilde, const Matrix& K1, const Matrix& K2,
                              Eigen::Index grid_size);

/// Realization of H for the circle criterion (exposed for oracle tests):
/// A_H = Atilde + Btilde K1 Ctilde, B_H = Btilde, C_H = (K1 - K2) Ctilde, D_H = I.
StateSpaceRealization circle_h_realization(const ModifiedLure& tilde, const Matrix& K1,
                                           const Matrix& K2);

/// Tsypkin-criterion values for the DMISB sector [0, kappa] with
/// multiplier I + (1 - q^{-1}) N applied to the loop-transformed system.
struct TsypkinResult {
  double zeta1 = 0.0;
  Eigen::Index zeta2 = 0;
  double zeta3 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  bool approximate = false;
  bool singular = false;  // A_KL not invertible; zeta1/zeta2 undefined
};
TsypkinResult tsypkin_criterion(const ModifiedLure& tilde_KL, const Matrix& kappa,
                                const Matrix& N, Eigen::Index grid_size);

/// Realization of L_N = kappa^{-1} - [I + (1 - q^{-1}) N] Gtilde_KL via a
/// one-step output delay (exposed for oracle tests).
StateSpaceRealization tsypkin_l_realization(const ModifiedLure& tilde_KL, const Matrix& kappa,
                                            const Matrix& N);

/// Evaluates both criteria at one frozen step. `tc_pass` additionally
/// requires |zeta1| above kZeta1Tolerance, full observability rank, and
/// zeta3 > 0.
StabilityReport evaluate_certificates(const LurePlant& plant, const IdentifiedModel& model,
                                      const Matrix& K, const SectorSpec& sector,
                                      Eigen::Index grid_size, long k);

/// Max of [gamma(y) - K1 y]^T [gamma(y) - K2 y] over a uniform probe grid
/// on [-box, box]^p; pass iff the worst value stays at or below 1e-9.
struct SectorCheckResult {
  bool pass = false;
  double worst_margin = 0.0;
  Vector worst_probe;
};
SectorCheckResult sector_check(const Nonlinearity& gamma, const Matrix& K1, const Matrix& K2,
                               double box, Eigen::Index points_per_axis);

/// Checks that gamma_KL(y) = gamma(y) + K_L y is diagonal, strictly
/// increasing per channel over consecutive probes, and satisfies
/// gamma^T (gamma - kappa y) <= 1e-9 at every probe.
bool dmisb_check(const Nonlinearity& gamma, double K_L, const Matrix& kappa,
                 double box, Eigen::Index points_per_axis);

}  // namespace lure_pcac
