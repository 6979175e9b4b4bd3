#pragma once

#include <cstdint>
#include <vector>

#include "idsq/matrix.hpp"
#include "idsq/model.hpp"

namespace idsq {

// Bidegree (k, m): k counts block-1 letters, m counts block-2 letters.
struct TraceSumSpec {
  unsigned k = 0;
  unsigned m = 0;
};

enum class TraceAlgorithm { Oracle, DP };

// Value of the block word-trace sum at (k, m), i.e. the coefficient of
// s1^k s2^m in trace((Q S)^{k+m}) with S = diag(s1 I_{n1}, s2 I_{n2}).
//
// For the oracle, term_count is the number of words enumerated and min_term is
// the smallest single word trace. The DP does not see individual words: it
// reports term_count == 0 and min_term == NaN.
struct TraceSumResult {
  double value = 0.0;
  std::uint64_t term_count = 0;
  double min_term = 0.0;
  TraceAlgorithm algorithm = TraceAlgorithm::Oracle;
};

inline constexpr unsigned kDefaultOracleCap = 12;
inline constexpr unsigned kMaxDpDegree = 400;

// Enumerates every word
//   B11^{k1} B12 B22^{m1} B21 ... B12 B22^{md} B21 B11^{k_{d+1}}   (first kind)
//   B22^{m1} B21 B11^{k1} B12 ... B21 B11^{kd} B12 B22^{m_{d+1}}   (second kind)
// with k1+...+k_{d+1}+d = k and m1+...+m_d+d = m (resp. with the roles of k and
// m exchanged), in the order: first kind, then second; d ascending; the
// block-1 exponents lexicographically, then the block-2 exponents.
// At k = m = 0 the single words are the identities and the value is n1 + n2.
// Throws CapExceeded if k + m > cap.
TraceSumResult trace_sum_oracle(const BlockMatrix& q, TraceSumSpec spec,
                                unsigned cap = kDefaultOracleCap);

// Extracts the same coefficient from the recurrence on matrix coefficients of
// (QS)^r in O((k+m) * min(k,m) * n^3). Throws CapExceeded beyond degree 400.
TraceSumResult trace_sum_dp(const BlockMatrix& q, TraceSumSpec spec);

// coeff[c] is the matrix coefficient of s1^c s2^{degree-c} in (QS)^degree.
struct CoeffTable {
  unsigned degree = 0;
  std::vector<Matrix> coeff;

  // Sum over c, i.e. (QS)^degree at s1 = s2 = 1, which is Q^degree.
  Matrix total() const;
};

CoeffTable coeff_table(const BlockMatrix& q, unsigned degree);

struct GridCell {
  unsigned k = 0;
  unsigned m = 0;
  double value = 0.0;
};

// All cells 0 <= k <= kmax, 0 <= m <= mmax from a single DP pass, sorted by
// (k, m).
std::vector<GridCell> trace_sum_grid(const BlockMatrix& q, unsigned kmax, unsigned mmax);

// The following need n1 == n2 == 2 and diagonal B11, B22 (within 1e-12 of the
// largest entry); they throw ShapeError otherwise. With B11 = diag(l1, l2),
// B22 = diag(l3, l4) and B12 = [c13 c14; c23 c24]:

// trace(B11^k B12 B22^m B21)
//   = l1^k l3^m c13^2 + l1^k l4^m c14^2 + l2^k l3^m c23^2 + l2^k l4^m c24^2.
double single_loop_trace_expansion(const BlockMatrix& q, unsigned k, unsigned m);

// trace(B11^k1 B12 B22^m1 B21 B11^k2 B12 B22^m2 B21) written as its nine
// monomial groups in (l1..l4, c13..c24).
double double_loop_trace_expansion(const BlockMatrix& q, unsigned k1, unsigned k2, unsigned m1,
                                   unsigned m2);

// Grouped form of the (3,3) sum:
//   trace(6 B11^2 B12 B22^2 B21 + 12 B11 B12 B21 B12 B22 B21 + 2 (B12 B21)^3).
// Needs 2x2 blocks only.
double closed_trace_sum_3_3(const BlockMatrix& q);

// Grouped form of the (3,4) sum:
//   trace(14 B11 B12 B21 B12 B22^2 B21 + 7 B11^2 B12 B22^3 B21
//         + 7 B11 (B12 B22 B21)^2 + 7 B12 B22 B21 (B12 B21)^2).
double closed_trace_sum_3_4(const BlockMatrix& q);

}  // namespace idsq
