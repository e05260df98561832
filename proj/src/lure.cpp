#include "lure_pcac/lure.hpp"

#include <algorithm>
#include <cmath>

namespace lure_pcac {

LurePlant::LurePlant(Matrix A, Matrix B, Matrix C, Vector x0)
    : ss(std::move(A), std::move(B), std::move(C)), x(std::move(x0)) {
  require(x.size() == ss.order(), "plant: initial state dimension mismatch");
  ensure_finite(x, "x0");
}

double ScalarNonlinearity::operator()(double y) const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::tanh_fn:
      return std::tanh(y);
    case Kind::affine_sine:
      return c1 * y + c2 * std::sin(y);
    case Kind::gaussian_plus_piecewise: {
      const double g1 = y / (gauss_scale * std::sqrt(2.0 * M_PI)) *
                        std::exp(-y * y / gauss_width);
      double g2;
      if (y <= break_lo)
        g2 = break_lo * break_lo + s_lo * (y - break_lo);
      else if (y < break_hi)
        g2 = y * y;
      else
        g2 = break_hi * break_hi + s_hi * (y - break_hi);
      return g1 + g2;
    }
    case Kind::table: {
      require(points.size() >= 2, "table nonlinearity needs at least two points");
      auto it = std::lower_bound(points.begin(), points.end(), y,
                                 [](const auto& pt, double v) { return pt.first < v; });
      if (it == points.begin()) ++it;
      if (it == points.end()) --it;
      const auto& [x1, v1] = *(it - 1);
      const auto& [x2, v2] = *it;
      return v1 + (v2 - v1) * (y - x1) / (x2 - x1);
    }
  }
  return 0.0;
}

ScalarNonlinearity ScalarNonlinearity::zero() { return {}; }

ScalarNonlinearity ScalarNonlinearity::tanh() {
  ScalarNonlinearity s;
  s.kind = Kind::tanh_fn;
  return s;
}

ScalarNonlinearity ScalarNonlinearity::affine_sine_fn(double c1, double c2) {
  ScalarNonlinearity s;
  s.kind = Kind::affine_sine;
  s.c1 = c1;
  s.c2 = c2;
  return s;
}

ScalarNonlinearity ScalarNonlinearity::gaussian_piecewise(double s_lo, double s_hi) {
  ScalarNonlinearity s;
  s.kind = Kind::gaussian_plus_piecewise;
  s.s_lo = s_lo;
  s.s_hi = s_hi;
  return s;
}

ScalarNonlinearity ScalarNonlinearity::from_table(std::vector<std::pair<double, double>> pts) {
  require(pts.size() >= 2, "table nonlinearity needs at least two points");
  require(std::is_sorted(pts.begin(), pts.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; }),
          "table nonlinearity points must be sorted by y");
  ScalarNonlinearity s;
  s.kind = Kind::table;
  s.points = std::move(pts);
  return s;
}

Nonlinearity Nonlinearity::diagonal(std::vector<ScalarNonlinearity> channels) {
  require(!channels.empty(), "diagonal nonlinearity needs at least one channel");
  Nonlinearity g;
  g.p_ = g.m_ = static_cast<Eigen::Index>(channels.size());
  g.channels_ = std::move(channels);
  return g;
}

Nonlinearity Nonlinearity::custom(Eigen::Index p, Eigen::Index m,
                                  std::function<Vector(const Vector&)> fn) {
  require(p >= 1 && m >= 1 && fn, "custom nonlinearity needs dimensions and a callable");
  Nonlinearity g;
  g.p_ = p;
  g.m_ = m;
  g.fn_ = std::move(fn);
  return g;
}

Vector Nonlinearity::operator()(const Vector& y) const {
  require(p_ > 0, "nonlinearity is unconfigured");
  require(y.size() == p_, "nonlinearity: input dimension mismatch");
  if (!channels_.empty()) {
    Vector out(m_);
    for (Eigen::Index i = 0; i < m_; ++i) out(i) = channels_[i](y(i));
    return out;
  }
  Vector out = fn_(y);
  require(out.size() == m_, "nonlinearity: callable returned wrong dimension");
  return out;
}

Vector PerturbationSchedule::at(long k, Eigen::Index m) const {
  auto it = impulses.find(k);
  if (it == impulses.end()) return Vector::Zero(m);
  require(it->second.size() == m, "perturbation dimension mismatch");
  return it->second;
}

void SimulationConfig::validate() const {
  require(plant.ss.order() > 0, "config: plant is unset");
  require(gamma.input_dim() == plant.p() && gamma.output_dim() == plant.m(),
          "config: nonlinearity dimensions must match the plant");
  require(k_engage >= 0 && k_engage <= k_final, "config: need 0 <= k_engage <= k_final");
  rls.validate();
  require(rls.p == plant.p() && rls.m == plant.m(), "config: rls dimensions mismatch");
  bpre.validate(rls.nhat * rls.p, rls.m);
  limits.validate();
  for (const auto& [k, v] : schedule.impulses) {
    require(k >= 0, "config: perturbation steps must be nonnegative");
    require(v.size() == plant.m(), "config: perturbation dimension mismatch");
  }
  require(std::is_sorted(checkpoints.begin(), checkpoints.end()),
          "config: checkpoints must be sorted");
}

Vector plant_step(LurePlant& plant, const Vector& u_k, const Vector& v_k,
                  const Nonlinearity& gamma) {
  Vector y = plant.output();
  plant.x = plant.ss.A * plant.x + plant.ss.B * (gamma(y) + u_k + v_k);
  return y;
}

Trajectory simulate(const SimulationConfig& config) {
  config.validate();
  const Eigen::Index p = config.plant.p(), m = config.plant.m();
  const Eigen::Index nhat = config.rls.nhat;

  LurePlant plant = config.plant;
  RlsState rls(config.rls);
  IoHistory history(nhat, p, m);

  Trajectory traj;
  traj.records.reserve(config.k_final + 1);
  auto next_checkpoint = config.checkpoints.begin();

  Vector u = Vector::Zero(m);       // u_0 = 0 by convention
  Vector u_req = Vector::Zero(m);
  Matrix K_applied = Matrix::Zero(m, nhat * p);

  for (long k = 0; k <= config.k_final; ++k) {
    const Vector y = plant.output();
    if (!y.allFinite() || !plant.x.allFinite() ||
        plant.x.cwiseAbs().maxCoeff() > kDivergenceGuard) {
      traj.diverged = true;
      traj.divergence_step = k;
      break;
    }

    double beta = 1.0;
    if (config.identify_during_open_loop || k >= config.k_engage) {
      const Matrix phi = RlsState::regressor(history, nhat, p, m);
      beta = rls.update(y, phi);
    }
    const IdentifiedModel model = rls.extract_model();
    const BocfRealization bocf = build_bocf(model, y, history);
    const Vector x_m_next = bocf.A_m * bocf.x_m + bocf.B_m * u;

    Vector u_next = Vector::Zero(m);
    Vector u_req_next = Vector::Zero(m);
    Matrix K_next = Matrix::Zero(m, nhat * p);
    if (k + 1 >= config.k_engage) {
      K_next = riccati_gain(bocf.A_m, bocf.B_m, config.bpre);
      u_req_next = control(K_next, x_m_next);
      u_next = saturate(u_req_next, config.limits);
    }

    const Vector v = config.schedule.at(k, m);
    traj.records.push_back({k, y, u_req, u, v, rls.theta().norm(), beta});
    if (next_checkpoint != config.checkpoints.end() && *next_checkpoint == k) {
      traj.snapshots.push_back({k, rls.theta(), K_applied});
      ++next_checkpoint;
    }

    plant.x = plant.ss.A * plant.x + plant.ss.B * (config.gamma(y) + u + v);
    history.push(y, u);
    u = u_next;
    u_req = u_req_next;
    K_applied = K_next;
  }
  return traj;
}

}  // namespace lure_pcac
