#include "lure_pcac/stability.hpp"

#include <cmath>

#include <Eigen/LU>

namespace lure_pcac {

void SectorSpec::validate() const {
  require(K1.rows() == K2.rows() && K1.cols() == K2.cols(), "sector: K1/K2 shape mismatch");
  const Matrix D = K2 - K1;
  require(D.rows() == D.cols(), "sector: K2 - K1 must be square");
  require((D - D.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, D.cwiseAbs().maxCoeff()),
          "sector: K2 - K1 must be symmetric");
  Eigen::LLT<Matrix> llt(D);
  require(llt.info() == Eigen::Success, "sector: K2 - K1 must be positive definite");
  require(kappa.rows() == K1.rows() && kappa.cols() == K1.rows(), "sector: kappa shape mismatch");
  require(N.rows() == K1.rows() && N.cols() == K1.rows(), "sector: N shape mismatch");
  for (Eigen::Index i = 0; i < N.rows(); ++i) {
    require(N(i, i) > 0.0, "sector: N must have positive diagonal entries");
    for (Eigen::Index j = 0; j < N.cols(); ++j)
      require(i == j || N(i, j) == 0.0, "sector: N must be diagonal");
  }
}

ControllerRealization controller_realization(const Matrix& A_m, const Matrix& B_m,
                                             const Matrix& C_m, const IdentifiedModel& model,
                                             const Matrix& K) {
  model.validate();
  const Eigen::Index np = model.nhat * model.p;
  require(A_m.rows() == np && A_m.cols() == np, "controller: A_m shape mismatch");
  require(B_m.rows() == np && B_m.cols() == model.m, "controller: B_m shape mismatch");
  require(C_m.rows() == model.p && C_m.cols() == np, "controller: C_m shape mismatch");
  require(K.rows() == model.m && K.cols() == np, "controller: gain shape mismatch");

  ControllerRealization ctrl;
  ctrl.F = Matrix(np, model.p);
  for (Eigen::Index i = 0; i < model.nhat; ++i)
    ctrl.F.middleRows(i * model.p, model.p) = -model.F[i];
  ctrl.K = K;
  ctrl.A_c = A_m - ctrl.F * C_m + B_m * K;
  ctrl.B_c = ctrl.F;
  ctrl.C_c = K;
  return ctrl;
}

ModifiedLure modified_lure(const LurePlant& plant, const ControllerRealization& ctrl) {
  const Eigen::Index n = plant.n(), nc = ctrl.A_c.rows();
  require(ctrl.B_c.cols() == plant.p(), "modified_lure: controller input dim mismatch");
  require(ctrl.C_c.rows() == plant.m(), "modified_lure: controller output dim mismatch");

  Matrix At(n + nc, n + nc);
  At.topLeftCorner(n, n) = plant.ss.A;
  At.topRightCorner(n, nc) = plant.ss.B * ctrl.C_c;
  At.bottomLeftCorner(nc, n) = ctrl.B_c * plant.ss.C;
  At.bottomRightCorner(nc, nc) = ctrl.A_c;

  Matrix Bt = Matrix::Zero(n + nc, plant.m());
  Bt.topRows(n) = plant.ss.B;
  Matrix Ct = Matrix::Zero(plant.p(), n + nc);
  Ct.leftCols(n) = plant.ss.C;

  ModifiedLure tilde;
  tilde.ss = StateSpaceRealization(std::move(At), std::move(Bt), std::move(Ct));
  tilde.plant_order = n;
  return tilde;
}

ModifiedLure loop_transform(const ModifiedLure& tilde, double K_L) {
  require(tilde.ss.inputs() == tilde.ss.outputs(),
          "loop_transform: square loop (m = p) required");
  ModifiedLure out = tilde;
  out.ss.A = tilde.ss.A - K_L * (tilde.ss.B * tilde.ss.C);
  return out;
}

StateSpaceRealization circle_h_realization(const ModifiedLure& tilde, const Matrix& K1,
                                           const Matrix& K2) {
  const Eigen::Index m = tilde.ss.inputs(), p = tilde.ss.outputs();
  require(K1.rows() == m && K1.cols() == p, "circle: K1 shape mismatch");
  require(K2.rows() == m && K2.cols() == p, "circle: K2 shape mismatch");
  Matrix A_H = tilde.ss.A + tilde.ss.B * K1 * tilde.ss.C;
  Matrix C_H = (K1 - K2) * tilde.ss.C;
  return StateSpaceRealization(std::move(A_H), tilde.ss.B, std::move(C_H),
                               Matrix::Identity(m, m));
}

namespace {

// Grid minimum over [0, pi] of the smallest eigenvalue of W + W^H for the
// frequency response W of `ss`. Skips singular grid points, flagging them.
double sweep_min_real(const StateSpaceRealization& ss, Eigen::Index grid_size,
                      bool* approximate) {
  require(grid_size >= 2, "frequency sweep needs at least two grid points");
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < grid_size; ++i) {
    const double psi = M_PI * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    try {
      const ComplexMatrix W = freq_response(ss, psi);
      best = std::min(best, hermitian_min_eig(W + W.adjoint()));
    } catch (const std::runtime_error&) {
      if (approximate) *approximate = true;
    }
  }
  require(std::isfinite(best), "frequency sweep failed at every grid point");
  return best;
}

}  // namespace

CircleResult circle_criterion(const ModifiedLure& tilde, const Matrix& K1, const Matrix& K2,
                              Eigen::Index grid_size) {
  const StateSpaceRealization H = circle_h_realization(tilde, K1, K2);
  CircleResult res;
  res.alpha = spectral_radius(H.A);
  res.beta = sweep_min_real(H, grid_size, &res.approximate);
  return res;
}

StateSpaceRealization tsypkin_l_realization(const ModifiedLure& tilde_KL, const Matrix& kappa,
                                            const Matrix& N) {
  const Eigen::Index m = tilde_KL.ss.inputs(), p = tilde_KL.ss.outputs();
  require(m == p, "tsypkin: square loop required");
  require(kappa.rows() == m && kappa.cols() == m, "tsypkin: kappa shape mismatch");
  require(N.rows() == m && N.cols() == m, "tsypkin: N shape mismatch");
  Eigen::FullPivLU<Matrix> lu(kappa);
  require(lu.isInvertible(), "tsypkin: kappa must be nonsingular");
  const Matrix kappa_inv = lu.inverse();

  const Eigen::Index nt = tilde_KL.ss.order();
  // Augment with a one-step delay of the output so that
  // C_L (qI - A_L)^{-1} B_L + kappa^{-1} = kappa^{-1} - [I + (1 - q^{-1}) N] Gtilde_KL.
  Matrix A_L = Matrix::Zero(nt + p, nt + p);
  A_L.topLeftCorner(nt, nt) = tilde_KL.ss.A;
  A_L.bottomLeftCorner(p, nt) = tilde_KL.ss.C;
  Matrix B_L = Matrix::Zero(nt + p, m);
  B_L.topRows(nt) = tilde_KL.ss.B;
  Matrix C_L(m, nt + p);
  C_L.leftCols(nt) = -(Matrix::Identity(m, m) + N) * tilde_KL.ss.C;
  C_L.rightCols(p) = N;
  return StateSpaceRealization(std::move(A_L), std::move(B_L), std::move(C_L), kappa_inv);
}

TsypkinResult tsypkin_criterion(const ModifiedLure& tilde_KL, const Matrix& kappa,
                                const Matrix& N, Eigen::Index grid_size) {
  TsypkinResult res;
  const StateSpaceRealization L = tsypkin_l_realization(tilde_KL, kappa, N);

  Eigen::FullPivLU<Matrix> lu(tilde_KL.ss.A);
  if (lu.isInvertible()) {
    const Matrix Ainv_B = lu.solve(tilde_KL.ss.B);
    res.zeta1 = Matrix(tilde_KL.ss.C * Ainv_B).determinant();
    const Matrix C_obs =
        tilde_KL.ss.C + N * tilde_KL.ss.C - N * tilde_KL.ss.C * lu.inverse();
    res.zeta2 = observability_rank(tilde_KL.ss.A, C_obs);
  } else {
    res.singular = true;
  }

  // Strictly proper Gtilde and bounded multiplier: the limit at infinity is
  // the D-term contribution kappa^{-1} + kappa^{-T}.
  res.zeta3 = hermitian_min_eig((L.D + L.D.transpose()).cast<Complex>());
  res.alpha = spectral_radius(L.A);
  res.beta = sweep_min_real(L, grid_size, &res.approximate);
  return res;
}

StabilityReport evaluate_certificates(const LurePlant& plant, const IdentifiedModel& model,
                                      const Matrix& K, const SectorSpec& sector,
                                      Eigen::Index grid_size, long k) {
  sector.validate();
  Matrix A_m, B_m, C_m;
  build_realization(model, A_m, B_m, C_m);
  const ControllerRealization ctrl = controller_realization(A_m, B_m, C_m, model, K);
  const ModifiedLure tilde = modified_lure(plant, ctrl);

  StabilityReport report;
  report.k = k;
  report.grid_size = grid_size;

  const CircleResult cc = circle_criterion(tilde, sector.K1, sector.K2, grid_size);
  report.alpha_cc = cc.alpha;
  report.beta_cc = cc.beta;
  report.cc_pass = cc.alpha < 1.0 && cc.beta > 0.0;
  report.approximate = cc.approximate;

  const ModifiedLure tilde_KL = loop_transform(tilde, sector.K_L);
  const TsypkinResult tc = tsypkin_criterion(tilde_KL, sector.kappa, sector.N, grid_size);
  report.zeta1 = tc.zeta1;
  report.zeta2 = tc.zeta2;
  report.zeta3_min_eig = tc.zeta3;
  report.alpha_tc = tc.alpha;
  report.beta_tc = tc.beta;
  report.tilde_singular = tc.singular;
  report.approximate = report.approximate || tc.approximate;
  const Eigen::Index full_rank = plant.n() + model.nhat * model.p;
  report.tc_pass = !tc.singular && std::fabs(tc.zeta1) > kZeta1Tolerance &&
                   tc.zeta2 == full_rank && tc.zeta3 > 0.0 && tc.alpha < 1.0 &&
                   tc.beta > 0.0;
  return report;
}

SectorCheckResult sector_check(const Nonlinearity& gamma, const Matrix& K1, const Matrix& K2,
                               double box, Eigen::Index points_per_axis) {
  const Eigen::Index p = gamma.input_dim();
  require(K1.cols() == p && K2.cols() == p, "sector_check: bound shape mismatch");
  require(points_per_axis >= 2, "sector_check: need at least two probes per axis");

  SectorCheckResult res;
  res.worst_margin = -std::numeric_limits<double>::infinity();

  std::vector<Eigen::Index> idx(p, 0);
  Vector y(p);
  while (true) {
    for (Eigen::Index d = 0; d < p; ++d)
      y(d) = -box + 2.0 * box * static_cast<double>(idx[d]) /
                        static_cast<double>(points_per_axis - 1);
    const Vector g = gamma(y);
    const double value = (g - K1 * y).dot(g - K2 * y);
    if (value > res.worst_margin) {
      res.worst_margin = value;
      res.worst_probe = y;
    }
    Eigen::Index d = 0;
    for (; d < p; ++d) {
      if (++idx[d] < points_per_axis) break;
      idx[d] = 0;
    }
    if (d == p) break;
  }
  res.pass = res.worst_margin <= 1e-9;
  return res;
}

bool dmisb_check(const Nonlinearity& gamma, double K_L, const Matrix& kappa,
                 double box, Eigen::Index points_per_axis) {
  const Eigen::Index m = gamma.output_dim();
  require(gamma.input_dim() == m, "dmisb_check: square loop required");
  require(kappa.rows() == m && kappa.cols() == m, "dmisb_check: kappa shape mismatch");
  require(points_per_axis >= 2, "dmisb_check: need at least two probes per axis");

  // Per-channel monotonicity plus the shifted sector inequality along the
  // diagonal probe line (gamma_KL is diagonal, so componentwise probing covers it).
  // Strict increase degrades to non-decrease where the channel saturates at
  // double precision (tanh beyond ~19 returns exactly 1).
  Vector prev;
  for (Eigen::Index i = 0; i < points_per_axis; ++i) {
    const double t = -box + 2.0 * box * static_cast<double>(i) /
                                static_cast<double>(points_per_axis - 1);
    const Vector y = Vector::Constant(m, t);
    const Vector g = gamma(y) + K_L * y;
    if (i > 0 && (g - prev).minCoeff() < 0.0) return false;
    if (g.dot(g - kappa * y) > 1e-9) return false;
    prev = g;
  }
  return true;
}

}  // namespace lure_pcac
