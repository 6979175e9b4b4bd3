#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "idsq/matrix.hpp"

namespace idsq {

// Symmetric matrix split into an (n1, n2) block partition
//
//   [ B11  B12 ]
//   [ B21  B22 ]
//
// with B12 == B21^T. Used for the tilted resolvent Q, for inverse covariances
// and for generic positive definite matrices in the signature constructions.
class BlockMatrix {
 public:
  BlockMatrix(SymMatrix full, std::size_t n1);

  const SymMatrix& full() const { return full_; }
  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return full_.dim() - n1_; }
  std::size_t dim() const { return full_.dim(); }

  Matrix b11() const { return full_.matrix().block(0, 0, n1(), n1()); }
  Matrix b12() const { return full_.matrix().block(0, n1(), n1(), n2()); }
  Matrix b21() const { return full_.matrix().block(n1(), 0, n2(), n1()); }
  Matrix b22() const { return full_.matrix().block(n1(), n1(), n2(), n2()); }

  bool is_2x2_blocks() const { return n1_ == 2 && n2() == 2; }

  friend bool operator==(const BlockMatrix&, const BlockMatrix&) = default;

 private:
  SymMatrix full_;
  std::size_t n1_;
};

// Exchanges the roles of the two blocks: [B22 B21; B12 B11].
BlockMatrix swap_blocks(const BlockMatrix& m);

// Centered Gaussian vector (X, Y) in R^{n1} x R^{n2} with positive definite
// covariance sigma, together with the tilt parameter a > 0.
class CovarianceModel {
 public:
  CovarianceModel(SymMatrix sigma, std::size_t n1, std::size_t n2, double a);

  const SymMatrix& sigma() const { return sigma_; }
  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }
  std::size_t dim() const { return n1_ + n2_; }
  double a() const { return a_; }

  CovarianceModel with_a(double a) const { return {sigma_, n1_, n2_, a}; }

 private:
  SymMatrix sigma_;
  std::size_t n1_;
  std::size_t n2_;
  double a_;
};

// The two-parameter families with diagonal blocks. `Resolvent` places the
// parameters in Q (with -delta at (2,4)); `Precision` places them in the
// inverse covariance (with -delta at (1,3)).
struct DeltaEpsilonFamily {
  enum class Kind { Resolvent, Precision };

  Kind kind = Kind::Resolvent;
  // (d1, d2, d3, d4) with d1 > d2 > 0 and d3 > d4 > 0.
  std::array<double, 4> diagonal{};
  double delta = 0.0;
  double epsilon = 0.0;

  // Throws InvalidArgument if an ordering or positivity constraint fails.
  void validate() const;
};

// Q = I - (I + a Sigma)^{-1}, partitioned like the model.
BlockMatrix build_q(const CovarianceModel& model);

BlockMatrix materialize(const DeltaEpsilonFamily& family);

// m / lambda_max(m). Throws DegenerateInput if lambda_max <= 0.
BlockMatrix scale_to_unit_spectral_radius(const BlockMatrix& m);

// Sigma^{-1} with the model's block partition.
BlockMatrix invert_blocks(const CovarianceModel& model);

// Covariance recovered from a resolvent: Sigma = ((I - Q)^{-1} - I) / a.
// Requires all eigenvalues of Q in (0, 1).
SymMatrix covariance_from_q(const BlockMatrix& q, double a);

// Default tilt grid used wherever "all sufficiently large a" is evaluated.
std::vector<double> default_a_grid();

// The fixed resolvent used for the surface reproduction: the Resolvent family
// with diagonal (0.8, 0.3, 0.8, 0.3), delta = 0.2, epsilon = 0.01, before
// scaling.
DeltaEpsilonFamily reference_family();

}  // namespace idsq
