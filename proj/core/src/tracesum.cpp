#include "idsq/tracesum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "idsq/error.hpp"
#include "idsq/summation.hpp"

namespace idsq {

namespace {

// Calls visit(parts) for every tuple of `count` non-negative integers summing
// to `total`, in lexicographic order.
void for_each_composition(unsigned total, unsigned count,
                          const std::function<void(const std::vector<unsigned>&)>& visit) {
  std::vector<unsigned> parts(count, 0);
  if (count == 0) {
    if (total == 0) visit(parts);
    return;
  }
  std::function<void(unsigned, unsigned)> rec = [&](unsigned idx, unsigned remaining) {
    if (idx + 1 == count) {
      parts[idx] = remaining;
      visit(parts);
      return;
    }
    for (unsigned p = 0; p <= remaining; ++p) {
      parts[idx] = p;
      rec(idx + 1, remaining - p);
    }
  };
  rec(0, total);
}

std::vector<Matrix> power_table(const Matrix& b, unsigned max_exponent) {
  std::vector<Matrix> pw;
  pw.reserve(max_exponent + 1);
  pw.push_back(Matrix::identity(b.rows()));
  for (unsigned p = 1; p <= max_exponent; ++p) pw.push_back(pw.back() * b);
  return pw;
}

// Accumulates one kind of word: outer blocks `outer` (diagonal block with
// `outer_total` letters spread over d+1 runs), inner diagonal block with
// `inner_total` letters over d runs, joined by `to_inner` / `to_outer`.
void enumerate_side(const std::vector<Matrix>& outer_pow, const std::vector<Matrix>& inner_pow,
                    const Matrix& to_inner, const Matrix& to_outer, unsigned outer_total,
                    unsigned inner_total, CompensatedSum& sum, std::uint64_t& count,
                    double& min_term) {
  const unsigned dmax = std::min(outer_total, inner_total);
  for (unsigned d = 0; d <= dmax; ++d) {
    if (d == 0 && inner_total != 0) continue;
    for_each_composition(outer_total - d, d + 1, [&](const std::vector<unsigned>& kp) {
      for_each_composition(inner_total - d, d, [&](const std::vector<unsigned>& mp) {
        Matrix w = outer_pow[kp[0]];
        for (unsigned i = 0; i < d; ++i) {
          w = w * to_inner * inner_pow[mp[i]] * to_outer * outer_pow[kp[i + 1]];
        }
        const double t = w.trace();
        sum += t;
        ++count;
        min_term = std::min(min_term, t);
      });
    });
  }
}

using LongMatrix = std::vector<long double>;

struct DpContext {
  std::size_t n;
  std::size_t n1;
  LongMatrix q;  // row-major n x n

  explicit DpContext(const BlockMatrix& bm) : n(bm.dim()), n1(bm.n1()), q(n * n) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) q[i * n + j] = bm.full()(i, j);
  }

  LongMatrix identity() const {
    LongMatrix id(n * n, 0.0L);
    for (std::size_t i = 0; i < n; ++i) id[i * n + i] = 1.0L;
    return id;
  }

  // out[:, cols] += src * q[:, cols] for cols in [c0, c1).
  void multiply_columns(const LongMatrix& src, LongMatrix& out, std::size_t c0,
                        std::size_t c1) const {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < n; ++l) {
        const long double s = src[i * n + l];
        if (s == 0.0L) continue;
        for (std::size_t j = c0; j < c1; ++j) out[i * n + j] += s * q[l * n + j];
      }
    }
  }

  long double trace(const LongMatrix& m) const {
    long double t = 0.0L;
    for (std::size_t i = 0; i < n; ++i) t += m[i * n + i];
    return t;
  }
};

// Runs the coefficient recurrence up to `degree`, keeping only c in
// [max(0, r - mmax), min(r, kmax)] at step r, and calls visit(r, c, coeff).
template <typename Visit>
void run_coefficient_dp(const DpContext& ctx, unsigned degree, unsigned kmax, unsigned mmax,
                        Visit&& visit) {
  const std::size_t n = ctx.n;
  std::vector<LongMatrix> prev{ctx.identity()};
  unsigned prev_lo = 0;
  visit(0u, 0u, prev[0]);
  for (unsigned r = 1; r <= degree; ++r) {
    const unsigned lo = r > mmax ? r - mmax : 0;
    const unsigned hi = std::min(r, kmax);
    if (lo > hi) break;
    const unsigned prev_hi = prev_lo + static_cast<unsigned>(prev.size()) - 1;
    std::vector<LongMatrix> next(hi - lo + 1, LongMatrix(n * n, 0.0L));
    for (unsigned c = lo; c <= hi; ++c) {
      LongMatrix& out = next[c - lo];
      // Block-1 columns gain one power of s1.
      if (c >= 1 && c - 1 >= prev_lo && c - 1 <= prev_hi) {
        ctx.multiply_columns(prev[c - 1 - prev_lo], out, 0, ctx.n1);
      }
      // Block-2 columns gain one power of s2.
      if (c >= prev_lo && c <= prev_hi) {
        ctx.multiply_columns(prev[c - prev_lo], out, ctx.n1, n);
      }
      visit(r, c, out);
    }
    prev = std::move(next);
    prev_lo = lo;
  }
}

void require_2x2(const BlockMatrix& q, const char* what) {
  if (!q.is_2x2_blocks()) throw ShapeError(std::string(what) + ": need n1 == n2 == 2");
}

void require_diagonal_blocks(const BlockMatrix& q, const char* what) {
  require_2x2(q, what);
  const double tol = 1e-12 * std::max(1.0, q.full().matrix().max_abs());
  if (std::abs(q.full()(0, 1)) > tol || std::abs(q.full()(2, 3)) > tol) {
    throw ShapeError(std::string(what) + ": diagonal blocks are not diagonal");
  }
}

}  // namespace

TraceSumResult trace_sum_oracle(const BlockMatrix& q, TraceSumSpec spec, unsigned cap) {
  if (spec.k + spec.m > cap) {
    throw CapExceeded("trace_sum_oracle: k + m = " + std::to_string(spec.k + spec.m) +
                      " exceeds cap " + std::to_string(cap));
  }
  const Matrix b12 = q.b12();
  const Matrix b21 = q.b21();
  const auto pow11 = power_table(q.b11(), spec.k);
  const auto pow22 = power_table(q.b22(), spec.m);

  CompensatedSum sum;
  TraceSumResult r;
  r.algorithm = TraceAlgorithm::Oracle;
  r.min_term = std::numeric_limits<double>::infinity();
  enumerate_side(pow11, pow22, b12, b21, spec.k, spec.m, sum, r.term_count, r.min_term);
  enumerate_side(pow22, pow11, b21, b12, spec.m, spec.k, sum, r.term_count, r.min_term);
  r.value = sum.value();
  return r;
}

TraceSumResult trace_sum_dp(const BlockMatrix& q, TraceSumSpec spec) {
  const unsigned degree = spec.k + spec.m;
  if (degree > kMaxDpDegree) {
    throw CapExceeded("trace_sum_dp: degree " + std::to_string(degree) + " exceeds " +
                      std::to_string(kMaxDpDegree));
  }
  const DpContext ctx(q);
  long double value = 0.0L;
  run_coefficient_dp(ctx, degree, spec.k, spec.m,
                     [&](unsigned r, unsigned c, const LongMatrix& coeff) {
                       if (r == degree && c == spec.k) value = ctx.trace(coeff);
                     });
  return {static_cast<double>(value), 0, std::numeric_limits<double>::quiet_NaN(),
          TraceAlgorithm::DP};
}

Matrix CoeffTable::total() const {
  if (coeff.empty()) throw ShapeError("CoeffTable::total on an empty table");
  Matrix t(coeff.front().rows(), coeff.front().cols());
  for (const auto& c : coeff) t += c;
  return t;
}

CoeffTable coeff_table(const BlockMatrix& q, unsigned degree) {
  if (degree < 1) throw InvalidArgument("coeff_table: degree must be >= 1");
  if (degree > kMaxDpDegree) {
    throw CapExceeded("coeff_table: degree " + std::to_string(degree) + " exceeds " +
                      std::to_string(kMaxDpDegree));
  }
  const DpContext ctx(q);
  const std::size_t n = ctx.n;
  CoeffTable table{degree, std::vector<Matrix>(degree + 1, Matrix(n, n))};
  run_coefficient_dp(ctx, degree, degree, degree,
                     [&](unsigned r, unsigned c, const LongMatrix& coeff) {
                       if (r != degree) return;
                       Matrix& out = table.coeff[c];
                       for (std::size_t i = 0; i < n; ++i)
                         for (std::size_t j = 0; j < n; ++j)
                           out(i, j) = static_cast<double>(coeff[i * n + j]);
                     });
  return table;
}

std::vector<GridCell> trace_sum_grid(const BlockMatrix& q, unsigned kmax, unsigned mmax) {
  const unsigned degree = kmax + mmax;
  if (degree > kMaxDpDegree) {
    throw CapExceeded("trace_sum_grid: kmax + mmax exceeds " + std::to_string(kMaxDpDegree));
  }
  const DpContext ctx(q);
  std::vector<GridCell> cells;
  cells.reserve(static_cast<std::size_t>(kmax + 1) * (mmax + 1));
  run_coefficient_dp(ctx, degree, kmax, mmax,
                     [&](unsigned r, unsigned c, const LongMatrix& coeff) {
                       cells.push_back({c, r - c, static_cast<double>(ctx.trace(coeff))});
                     });
  std::sort(cells.begin(), cells.end(), [](const GridCell& a, const GridCell& b) {
    return a.k != b.k ? a.k < b.k : a.m < b.m;
  });
  return cells;
}

double single_loop_trace_expansion(const BlockMatrix& q, unsigned k, unsigned m) {
  require_diagonal_blocks(q, "single_loop_trace_expansion");
  const auto& f = q.full();
  const double l1 = f(0, 0), l2 = f(1, 1), l3 = f(2, 2), l4 = f(3, 3);
  const double c13 = f(0, 2), c14 = f(0, 3), c23 = f(1, 2), c24 = f(1, 3);
  const double p1 = std::pow(l1, k), p2 = std::pow(l2, k);
  const double p3 = std::pow(l3, m), p4 = std::pow(l4, m);
  return p1 * p3 * c13 * c13 + p1 * p4 * c14 * c14 + p2 * p3 * c23 * c23 + p2 * p4 * c24 * c24;
}

double double_loop_trace_expansion(const BlockMatrix& q, unsigned k1, unsigned k2, unsigned m1,
                                   unsigned m2) {
  require_diagonal_blocks(q, "double_loop_trace_expansion");
  const auto& f = q.full();
  const double l1 = f(0, 0), l2 = f(1, 1), l3 = f(2, 2), l4 = f(3, 3);
  const double c13 = f(0, 2), c14 = f(0, 3), c23 = f(1, 2), c24 = f(1, 3);
  auto pw = [](double x, unsigned e) { return std::pow(x, e); };
  const unsigned ks = k1 + k2;
  const unsigned ms = m1 + m2;
  const double mix12 = pw(l1, k1) * pw(l2, k2) + pw(l1, k2) * pw(l2, k1);
  const double mix34 = pw(l3, m1) * pw(l4, m2) + pw(l3, m2) * pw(l4, m1);
  auto sq = [](double x) { return x * x; };

  double t = 0.0;
  t += pw(l1, ks) * pw(l3, ms) * sq(sq(c13));
  t += pw(l1, ks) * pw(l4, ms) * sq(sq(c14));
  t += pw(l2, ks) * pw(l3, ms) * sq(sq(c23));
  t += pw(l2, ks) * pw(l4, ms) * sq(sq(c24));
  t += pw(l1, ks) * mix34 * sq(c13) * sq(c14);
  t += pw(l2, ks) * mix34 * sq(c23) * sq(c24);
  t += pw(l3, ms) * mix12 * sq(c13) * sq(c23);
  t += pw(l4, ms) * mix12 * sq(c14) * sq(c24);
  // Signed entries: with c24 = -|c24| this is the usual negative cross term.
  t += mix12 * mix34 * c13 * c23 * c14 * c24;
  return t;
}

double closed_trace_sum_3_3(const BlockMatrix& q) {
  require_2x2(q, "closed_trace_sum_3_3");
  const Matrix b11 = q.b11(), b12 = q.b12(), b21 = q.b21(), b22 = q.b22();
  const Matrix loop = b12 * b21;
  const Matrix sum = 6.0 * (b11 * b11 * b12 * b22 * b22 * b21) +
                     12.0 * (b11 * b12 * b21 * b12 * b22 * b21) + 2.0 * (loop * loop * loop);
  return sum.trace();
}

double closed_trace_sum_3_4(const BlockMatrix& q) {
  require_2x2(q, "closed_trace_sum_3_4");
  const Matrix b11 = q.b11(), b12 = q.b12(), b21 = q.b21(), b22 = q.b22();
  const Matrix loop = b12 * b21;
  const Matrix weighted = b12 * b22 * b21;
  const Matrix sum = 14.0 * (b11 * b12 * b21 * b12 * b22 * b22 * b21) +
                     7.0 * (b11 * b11 * b12 * b22 * b22 * b22 * b21) +
                     7.0 * (b11 * weighted * weighted) + 7.0 * (weighted * loop * loop);
  return sum.trace();
}

}  // namespace idsq
