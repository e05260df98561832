#include "lure_pcac/bocf.hpp"

namespace lure_pcac {

void IdentifiedModel::validate() const {
  require(nhat >= 1, "model order nhat must be at least 1");
  require(p >= 1 && m >= 1, "model dimensions must be positive");
  require(static_cast<Eigen::Index>(F.size()) == nhat &&
              static_cast<Eigen::Index>(G.size()) == nhat,
          "model must carry nhat F and G blocks");
  for (const Matrix& Fi : F) {
    require(Fi.rows() == p && Fi.cols() == p, "F block shape mismatch");
    ensure_finite(Fi, "F block");
  }
  for (const Matrix& Gi : G) {
    require(Gi.rows() == p && Gi.cols() == m, "G block shape mismatch");
    ensure_finite(Gi, "G block");
  }
}

IoHistory::IoHistory(Eigen::Index depth, Eigen::Index p, Eigen::Index m)
    : depth_(depth), p_(p), m_(m),
      ys_(depth, Vector::Zero(p)), us_(depth, Vector::Zero(m)) {}

void IoHistory::push(const Vector& y, const Vector& u) {
  require(y.size() == p_ && u.size() == m_, "history push: dimension mismatch");
  ys_.insert(ys_.begin(), y);
  us_.insert(us_.begin(), u);
  ys_.resize(depth_);
  us_.resize(depth_);
}

const Vector& IoHistory::y(Eigen::Index i) const { return ys_.at(i); }
const Vector& IoHistory::u(Eigen::Index i) const { return us_.at(i); }

void build_realization(const IdentifiedModel& model, Matrix& A_m, Matrix& B_m, Matrix& C_m) {
  model.validate();
  const Eigen::Index nhat = model.nhat, p = model.p, m = model.m;
  A_m = Matrix::Zero(nhat * p, nhat * p);
  B_m = Matrix::Zero(nhat * p, m);
  for (Eigen::Index i = 0; i < nhat; ++i) {
    A_m.block(i * p, 0, p, p) = -model.F[i];
    if (i + 1 < nhat)
      A_m.block(i * p, (i + 1) * p, p, p) = Matrix::Identity(p, p);
    B_m.block(i * p, 0, p, m) = model.G[i];
  }
  C_m = Matrix::Zero(p, nhat * p);
  C_m.leftCols(p) = Matrix::Identity(p, p);
}

Vector build_state(const IdentifiedModel& model, const Vector& y_k, const IoHistory& history) {
  model.validate();
  const Eigen::Index nhat = model.nhat, p = model.p;
  require(y_k.size() == p, "build_state: y_k dimension mismatch");
  require(history.p() == p && history.m() == model.m, "build_state: history dimension mismatch");
  require(history.depth() >= nhat - 1, "build_state: history too shallow");
  Vector x = Vector::Zero(nhat * p);
  x.head(p) = y_k;
  for (Eigen::Index j = 2; j <= nhat; ++j) {
    Vector blk = Vector::Zero(p);
    for (Eigen::Index i = 1; i <= nhat - j + 1; ++i)
      blk += -model.F[i + j - 2] * history.y(i - 1) + model.G[i + j - 2] * history.u(i - 1);
    x.segment((j - 1) * p, p) = blk;
  }
  return x;
}

BocfRealization build_bocf(const IdentifiedModel& model, const Vector& y_k,
                           const IoHistory& history) {
  BocfRealization r;
  build_realization(model, r.A_m, r.B_m, r.C_m);
  r.x_m = build_state(model, y_k, history);
  return r;
}

}  // namespace lure_pcac
