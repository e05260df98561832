#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "lure_pcac/bpre.hpp"
#include "lure_pcac/numerics.hpp"
#include "lure_pcac/rls.hpp"

namespace lure_pcac {

/// Strictly proper discrete-time plant with current state.
struct LurePlant {
  StateSpaceRealization ss;  // D = 0 exactly
  Vector x;

  LurePlant() = default;
  LurePlant(Matrix A, Matrix B, Matrix C, Vector x0);

  Eigen::Index n() const { return ss.order(); }
  Eigen::Index m() const { return ss.inputs(); }
  Eigen::Index p() const { return ss.outputs(); }
  Vector output() const { return ss.C * x; }
};

/// One scalar output-to-input channel of a memoryless nonlinearity.
struct ScalarNonlinearity {
  enum class Kind { zero, tanh_fn, affine_sine, gaussian_plus_piecewise, table };
  Kind kind = Kind::zero;

  // affine_sine: c1 * y + c2 * sin(y)
  double c1 = 0.0, c2 = 0.0;

  // gaussian_plus_piecewise: gamma1 + gamma2 where
  //   gamma1(y) = y / (gauss_scale * sqrt(2 pi)) * exp(-y^2 / gauss_width)
  //   gamma2(y) = break^2-continuous parabola on (break_lo, break_hi) with
  //               linear branches of slope s_lo / s_hi outside.
  double gauss_scale = 0.422, gauss_width = 1.125;
  double break_lo = -0.4, break_hi = 0.8;
  double s_lo = 1.0, s_hi = 1.0;

  // table: piecewise-linear interpolation through sorted (y, value) points,
  // extrapolating the end segments.
  std::vector<std::pair<double, double>> points;

  double operator()(double y) const;

  static ScalarNonlinearity zero();
  static ScalarNonlinearity tanh();
  static ScalarNonlinearity affine_sine_fn(double c1, double c2);
  static ScalarNonlinearity gaussian_piecewise(double s_lo, double s_hi);
  static ScalarNonlinearity from_table(std::vector<std::pair<double, double>> pts);
};

/// Memoryless map from plant output to the feedback input. Diagonal form
/// (one scalar channel per component, requires m == p) or an arbitrary
/// callable for tests.
class Nonlinearity {
 public:
  Nonlinearity() = default;
  static Nonlinearity diagonal(std::vector<ScalarNonlinearity> channels);
  static Nonlinearity custom(Eigen::Index p, Eigen::Index m,
                             std::function<Vector(const Vector&)> fn);

  Vector operator()(const Vector& y) const;
  Eigen::Index input_dim() const { return p_; }
  Eigen::Index output_dim() const { return m_; }
  bool is_diagonal() const { return !channels_.empty(); }
  const std::vector<ScalarNonlinearity>& channels() const { return channels_; }

 private:
  Eigen::Index p_ = 0, m_ = 0;
  std::vector<ScalarNonlinearity> channels_;
  std::function<Vector(const Vector&)> fn_;
};

/// Impulsive perturbation schedule: nonzero v_k only at listed steps.
struct PerturbationSchedule {
  std::map<long, Vector> impulses;

  Vector at(long k, Eigen::Index m) const;
};

/// Everything one closed-loop experiment needs.
struct SimulationConfig {
  LurePlant plant;
  Nonlinearity gamma;
  PerturbationSchedule schedule;
  RlsConfig rls;
  BpreConfig bpre;
  SaturationLimits limits;
  long k_engage = 100;
  long k_final = 1000;
  bool identify_during_open_loop = false;
  std::vector<long> checkpoints;  // sorted steps at which to snapshot

  void validate() const;
};

/// Frozen identification snapshot used for per-step certificates.
struct CheckpointSnapshot {
  long k = 0;
  Vector theta;  // estimate produced at step k (generation k+1)
  Matrix K;      // gain applied at step k (zero before engagement)
};

struct TrajectoryRecord {
  long k = 0;
  Vector y, u_req, u, v;
  double theta_norm = 0.0;
  double beta = 1.0;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  std::vector<CheckpointSnapshot> snapshots;
  bool diverged = false;
  long divergence_step = -1;
};

/// Reads y_k = C x_k, then advances x via A x + B (gamma(y) + u + v).
/// Returns y_k. Divergence (non-finite or |x|_inf beyond the guard) is
/// reported by the driver, not here.
Vector plant_step(LurePlant& plant, const Vector& u_k, const Vector& v_k,
                  const Nonlinearity& gamma);

/// Full PCAC closed loop. Per step: measure, identify, rebuild the model
/// realization and state, propagate one step, gain + saturation once the
/// loop is engaged, then advance the plant. u_0 = 0.
Trajectory simulate(const SimulationConfig& config);

constexpr double kDivergenceGuard = 1e12;

}  // namespace lure_pcac
