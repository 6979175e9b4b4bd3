#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idsq/matrix.hpp"
#include "idsq/model.hpp"

namespace idsq {

// Block-diagonal orthogonal matrix diag(U1, U2) with U1 (n1 x n1) and U2
// (n2 x n2) orthogonal. Conjugating by it leaves (||X||^2, ||Y||^2)
// unchanged in distribution.
class SignatureMatrix {
 public:
  // Throws InvalidArgument unless both blocks are square and orthogonal to 1e-10.
  SignatureMatrix(Matrix u1, Matrix u2);

  static SignatureMatrix identity(std::size_t n1, std::size_t n2);

  const Matrix& u1() const { return u1_; }
  const Matrix& u2() const { return u2_; }
  std::size_t n1() const { return u1_.rows(); }
  std::size_t n2() const { return u2_.rows(); }

  Matrix full() const { return block_diag(u1_, u2_); }

  // U^T A U.
  Matrix conjugate(const Matrix& a) const;
  BlockMatrix conjugate(const BlockMatrix& a) const;

  // max |U^T U - I| over both blocks.
  double orthogonality_error() const;

  // One Newton-Schulz polar step per block: U <- U (3I - U^T U) / 2.
  SignatureMatrix reorthonormalized() const;

 private:
  Matrix u1_;
  Matrix u2_;
};

enum class Criterion {
  GriffithsBapat,         // +-1 diagonal conjugation makes Sigma^{-1} an M-matrix
  Shanbhag,               // n1 == 1
  WordTraceSign,          // every single-kind word trace of Q is >= 0
  InverseCovarianceSign,  // some signature conjugation gives Sigma^{-1} non-positive off-diagonals
  NonnegativeSignature,   // a signature conjugation makes A entrywise >= 0
};

std::string_view to_string(Criterion c);

struct CriterionReport {
  Criterion criterion = Criterion::GriffithsBapat;
  bool holds = false;
  std::optional<SignatureMatrix> witness;
  // Sign-vector witness (GriffithsBapat only).
  std::vector<int> signs;
  std::map<std::string, double> detail;
};

// W and W^T A W with both diagonal blocks diagonal, entries sorted descending.
struct BlockDiagonalization {
  SignatureMatrix w;
  BlockMatrix rotated;
};

// Throws NotPositiveDefinite.
BlockDiagonalization block_diagonalize(const BlockMatrix& a);

// For a positive definite A with 2 + 2 blocks: in the frame of
// block_diagonalize, with v = (v11, v21) the top eigenvector of A12 A21 (v11 >= 0),
// evaluates
//     v11 a13 (v11 a13 + v21 a23) >= 0,
// which holds iff some signature matrix makes A entrywise non-negative, iff
// every word trace A11^k1 A12 A22^m1 A21 ... A11^k_{d+1} is non-negative.
//
// Ties: when a33 == a44 (resp. a11 == a22) up to 1e-10 relative, the free
// rotation of that block is chosen to zero a23, and when the two eigenvalues
// of A12 A21 tie, v = (1, 0). detail["quantity"] is the left-hand side.
// Throws ShapeError unless n1 == n2 == 2.
CriterionReport nonnegative_signature_check(const BlockMatrix& a);

// U with U^T A U entrywise >= -1e-10 (relative to max |A|). Follows the sign
// flip reduction, then either the explicit normalized U2 (when
// a13 a23 - a14 a24 >= 0) or the singular-vector construction.
// Throws PreconditionViolated if the sign inequality fails.
SignatureMatrix construct_nonneg_signature(const BlockMatrix& a);

// Same inequality evaluated on a resolvent Q (single tilt).
CriterionReport word_trace_condition(const BlockMatrix& q);

// When v21 a24 (v21 a24 + v11 a14) >= 0 (same frame and eigenvector as
// above), returns U with non-positive off-diagonal entries in U^T A U;
// otherwise nullopt (no such signature matrix exists).
std::optional<SignatureMatrix> construct_nonpositive_offdiag_signature(const BlockMatrix& a);

// Inequality value for construct_nonpositive_offdiag_signature.
double nonpositive_offdiag_quantity(const BlockMatrix& a);

// The inverse-covariance sign inequality on Sigma^{-1}, with the witness from
// construct_nonpositive_offdiag_signature. Holding certifies infinite
// divisibility. Throws ShapeError unless n1 == n2 == 2.
CriterionReport precision_signature_check(const CovarianceModel& model);

// Exhaustive search over sign vectors (first sign fixed to +1) for one making
// every off-diagonal entry of D Sigma^{-1} D <= 1e-12 * max |Sigma^{-1}|.
// The lowest-index sign vector wins. Throws CapExceeded for n > 20.
CriterionReport griffiths_bapat_check(const SymMatrix& sigma);

// n1 == 1: always holds. Also checks Q11 > 0 and Q12 Q22^p Q21 >= -1e-12
// for p = 0..max_power and records the smallest value. Throws ShapeError
// otherwise.
CriterionReport shanbhag_check(const CovarianceModel& model, unsigned max_power = 32);

// trace(A11^K A12 A22^K A21 (A12 A21)^K) / (a11 a33 lambda1)^K, computed from
// the original blocks (a11, a33 and lambda1 are the top eigenvalues of A11,
// A22 and A12 A21).
double normalized_limiting_word(const BlockMatrix& a, unsigned K);

struct LimitingWordHit {
  unsigned K = 0;
  double normalized_trace = 0.0;
};

// Grows K from 1 to max_K and returns the first K where the normalized
// limiting word is negative for three consecutive K, or nullopt.
std::optional<LimitingWordHit> limiting_word_search(const BlockMatrix& a, unsigned max_K = 200);

}  // namespace idsq
