#include "idsq/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "idsq/error.hpp"

namespace idsq {

namespace {

constexpr int kMaxSweeps = 100;

void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const std::size_t n = a.rows();
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = a(p, k) = c * akp - s * akq;
    a(k, q) = a(q, k) = s * akp + c * akq;
  }
  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = a(q, p) = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

SymEigen eigen_sym(const SymMatrix& m) {
  const std::size_t n = m.dim();
  Matrix a = m.matrix();
  Matrix v = Matrix::identity(n);

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Negligible relative to both diagonal entries: drop it.
        const double g = 100.0 * std::abs(apq);
        if (std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        converged = false;
        rotate(a, v, p, q);
      }
    }
  }
  if (!converged) throw InternalError("eigen_sym: Jacobi sweep cap reached");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymEigen out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

double largest_eigenvalue(const SymMatrix& m) { return eigen_sym(m).values.front(); }

double smallest_eigenvalue(const SymMatrix& m) { return eigen_sym(m).values.back(); }

EigenPair2 eigen2(double a11, double a12, double a22) {
  EigenPair2 e;
  if (a12 == 0.0) {
    if (a11 >= a22) {
      e.lambda1 = a11;
      e.lambda2 = a22;
      e.v1 = {1.0, 0.0};
    } else {
      e.lambda1 = a22;
      e.lambda2 = a11;
      e.v1 = {0.0, 1.0};
    }
    e.v2 = {-e.v1[1], e.v1[0]};
    return e;
  }

  const double half = 0.5 * (a11 - a22);
  const double mid = 0.5 * (a11 + a22);
  const double r = std::hypot(half, a12);
  e.lambda1 = mid + r;
  e.lambda2 = mid - r;

  // Pick whichever null-vector formula of (A - lambda1 I) avoids cancellation.
  double x, y;
  if (half >= 0.0) {
    x = r + half;
    y = a12;
  } else {
    x = a12;
    y = r - half;
  }
  const double norm = std::hypot(x, y);
  x /= norm;
  y /= norm;
  if (x < 0.0 || (x == 0.0 && y < 0.0)) {
    x = -x;
    y = -y;
  }
  e.v1 = {x, y};
  e.v2 = {-y, x};
  return e;
}

EigenPair2 eigen2(const SymMatrix& m) {
  if (m.dim() != 2) throw ShapeError("eigen2 expects a 2x2 matrix");
  return eigen2(m(0, 0), m(0, 1), m(1, 1));
}

}  // namespace idsq
