#include "idsq/cholesky.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "idsq/error.hpp"

namespace idsq {

namespace {

// Returns the factor, or the index of the first failing pivot.
std::optional<Matrix> try_cholesky(const SymMatrix& m, std::size_t* failed_at) {
  const std::size_t n = m.dim();
  const double tol = cholesky_pivot_tolerance(m);
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > tol)) {
      if (failed_at) *failed_at = j;
      return std::nullopt;
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

}  // namespace

double cholesky_pivot_tolerance(const SymMatrix& m) {
  return 1e-12 * m.trace() / static_cast<double>(m.dim());
}

Matrix cholesky(const SymMatrix& m) {
  if (!(m.trace() > 0.0)) throw NotPositiveDefinite("cholesky: non-positive trace");
  std::size_t failed = 0;
  auto l = try_cholesky(m, &failed);
  if (!l) throw NotPositiveDefinite("cholesky: pivot " + std::to_string(failed) + " not positive");
  return *std::move(l);
}

bool is_positive_definite(const SymMatrix& m) {
  if (!(m.trace() > 0.0)) return false;
  return try_cholesky(m, nullptr).has_value();
}

void forward_substitute(const Matrix& lower, std::span<double> b) {
  const std::size_t n = lower.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * b[k];
    b[i] = s / lower(i, i);
  }
}

SymMatrix inverse_spd(const SymMatrix& m) {
  const Matrix l = cholesky(m);
  const std::size_t n = m.dim();
  // inv(m) = inv(L)^T inv(L); build inv(L) column by column.
  Matrix linv(n, n);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = 1.0;
    forward_substitute(l, col);
    for (std::size_t i = 0; i < n; ++i) linv(i, j) = col[i];
  }
  return SymMatrix(linv.transpose() * linv);
}

double log_det_spd(const SymMatrix& m) {
  const Matrix l = cholesky(m);
  double s = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

}  // namespace idsq
