#pragma once

#include <vector>

#include "lure_pcac/numerics.hpp"

namespace lure_pcac {

/// ARX coefficient blocks identified online: y_k is modeled as
///   -sum_i F[i] y_{k-i} + sum_i G[i] u_{k-i},  i = 1..nhat.
/// `step_tag` records which estimate generation the blocks belong to so a
/// simulation driver cannot mix generations.
struct IdentifiedModel {
  Eigen::Index nhat = 0;
  Eigen::Index p = 0;
  Eigen::Index m = 0;
  std::vector<Matrix> F;  // nhat blocks, each p x p
  std::vector<Matrix> G;  // nhat blocks, each p x m
  long step_tag = 0;

  void validate() const;
};

/// Block-observable-canonical-form realization of an IdentifiedModel,
/// with the state reconstructed from input/output history.
struct BocfRealization {
  Matrix A_m;  // nhat*p x nhat*p
  Matrix B_m;  // nhat*p x m
  Matrix C_m;  // p x nhat*p, [I_p 0 ... 0]
  Vector x_m;  // nhat*p
};

/// Newest-first input/output history with implicit zero padding: y(0) is
/// y_{k-1}, y(1) is y_{k-2}, ... Indices at or beyond the stored depth
/// read as zero.
class IoHistory {
 public:
  IoHistory() = default;
  IoHistory(Eigen::Index depth, Eigen::Index p, Eigen::Index m);

  void push(const Vector& y, const Vector& u);
  const Vector& y(Eigen::Index lag_minus_1) const;
  const Vector& u(Eigen::Index lag_minus_1) const;
  Eigen::Index depth() const { return depth_; }
  Eigen::Index p() const { return p_; }
  Eigen::Index m() const { return m_; }

 private:
  Eigen::Index depth_ = 0, p_ = 0, m_ = 0;
  std::vector<Vector> ys_, us_;  // newest first, length depth_
};

/// Assembles (A_m, B_m, C_m) from the model blocks: first block column of
/// A_m stacks -F[i], superdiagonal blocks are I_p, B_m stacks G[i].
void build_realization(const IdentifiedModel& model, Matrix& A_m, Matrix& B_m, Matrix& C_m);

/// State whose first block is y_k; block j (j >= 2) is
///   -sum_{i=1}^{nhat-j+1} F[i+j-1] y_{k-i} + sum G[i+j-1] u_{k-i}.
Vector build_state(const IdentifiedModel& model, const Vector& y_k, const IoHistory& history);

/// Convenience combining build_realization and build_state.
BocfRealization build_bocf(const IdentifiedModel& model, const Vector& y_k,
                           const IoHistory& history);

}  // namespace lure_pcac
