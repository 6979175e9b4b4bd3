#include "idsq/model.hpp"

#include <cmath>
#include <string>

#include "idsq/cholesky.hpp"
#include "idsq/eigen.hpp"
#include "idsq/error.hpp"

namespace idsq {

BlockMatrix::BlockMatrix(SymMatrix full, std::size_t n1) : full_(std::move(full)), n1_(n1) {
  if (n1_ == 0 || n1_ >= full_.dim()) {
    throw ShapeError("BlockMatrix: need 1 <= n1 < dim, got n1=" + std::to_string(n1_) +
                     " dim=" + std::to_string(full_.dim()));
  }
}

BlockMatrix swap_blocks(const BlockMatrix& m) {
  const std::size_t n2 = m.n2();
  Matrix s(m.dim(), m.dim());
  s.set_block(0, 0, m.b22());
  s.set_block(0, n2, m.b21());
  s.set_block(n2, 0, m.b12());
  s.set_block(n2, n2, m.b11());
  return BlockMatrix(SymMatrix(s), n2);
}

CovarianceModel::CovarianceModel(SymMatrix sigma, std::size_t n1, std::size_t n2, double a)
    : sigma_(std::move(sigma)), n1_(n1), n2_(n2), a_(a) {
  if (n1_ == 0 || n2_ == 0) throw InvalidArgument("CovarianceModel: n1 and n2 must be positive");
  if (n1_ + n2_ != sigma_.dim()) {
    throw InvalidArgument("CovarianceModel: n1 + n2 = " + std::to_string(n1_ + n2_) +
                          " but sigma has dimension " + std::to_string(sigma_.dim()));
  }
  if (!(a_ > 0.0) || !std::isfinite(a_)) throw InvalidArgument("CovarianceModel: a must be > 0");
  if (!is_positive_definite(sigma_)) {
    throw NotPositiveDefinite("CovarianceModel: sigma is not positive definite");
  }
}

void DeltaEpsilonFamily::validate() const {
  const auto& d = diagonal;
  if (!(d[1] > 0.0 && d[0] > d[1])) {
    throw InvalidArgument("DeltaEpsilonFamily: need d1 > d2 > 0");
  }
  if (!(d[3] > 0.0 && d[2] > d[3])) {
    throw InvalidArgument("DeltaEpsilonFamily: need d3 > d4 > 0");
  }
  if (!(delta > 0.0) || !(epsilon > 0.0)) {
    throw InvalidArgument("DeltaEpsilonFamily: delta and epsilon must be positive");
  }
}

BlockMatrix build_q(const CovarianceModel& model) {
  const std::size_t n = model.dim();
  const Matrix eye = Matrix::identity(n);
  const SymMatrix shifted(eye + model.sigma().matrix() * model.a());
  const SymMatrix inv = inverse_spd(shifted);
  return BlockMatrix(SymMatrix(eye - inv.matrix()), model.n1());
}

BlockMatrix materialize(const DeltaEpsilonFamily& family) {
  family.validate();
  const auto& d = family.diagonal;
  const double e = family.epsilon;
  const double dl = family.delta;
  if (family.kind == DeltaEpsilonFamily::Kind::Resolvent) {
    return BlockMatrix(SymMatrix{{d[0], 0.0, e, e},
                                 {0.0, d[1], e, -dl},
                                 {e, e, d[2], 0.0},
                                 {e, -dl, 0.0, d[3]}},
                       2);
  }
  return BlockMatrix(SymMatrix{{d[0], 0.0, -dl, e},
                               {0.0, d[1], e, e},
                               {-dl, e, d[2], 0.0},
                               {e, e, 0.0, d[3]}},
                     2);
}

BlockMatrix scale_to_unit_spectral_radius(const BlockMatrix& m) {
  const double top = largest_eigenvalue(m.full());
  if (!(top > 0.0)) throw DegenerateInput("scale_to_unit_spectral_radius: lambda_max <= 0");
  return BlockMatrix(m.full().scaled(1.0 / top), m.n1());
}

BlockMatrix invert_blocks(const CovarianceModel& model) {
  return BlockMatrix(inverse_spd(model.sigma()), model.n1());
}

SymMatrix covariance_from_q(const BlockMatrix& q, double a) {
  if (!(a > 0.0)) throw InvalidArgument("covariance_from_q: a must be > 0");
  const std::size_t n = q.dim();
  const Matrix eye = Matrix::identity(n);
  const SymMatrix resolvent(eye - q.full().matrix());
  const SymMatrix inv = inverse_spd(resolvent);
  return SymMatrix((inv.matrix() - eye) * (1.0 / a));
}

std::vector<double> default_a_grid() { return {1.0, 10.0, 100.0, 1000.0, 10000.0}; }

DeltaEpsilonFamily reference_family() {
  return {DeltaEpsilonFamily::Kind::Resolvent, {0.8, 0.3, 0.8, 0.3}, 0.2, 0.01};
}

}  // namespace idsq
