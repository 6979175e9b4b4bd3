#include "coefficient_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "idsq/error.hpp"

namespace idsq::cli {

namespace {

using cplx = std::complex<double>;

// det of a dense complex matrix by partial-pivoting LU.
cplx complex_det(std::vector<cplx> a, std::size_t n) {
  cplx det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      det = -det;
    }
    const cplx p = a[col * n + col];
    det *= p;
    if (p == 0.0) return 0.0;
    for (std::size_t r = col + 1; r < n; ++r) {
      const cplx f = a[r * n + col] / p;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
    }
  }
  return det;
}

cplx transform_det(const CovarianceModel& model, cplx s1, cplx s2) {
  const std::size_t n = model.dim();
  std::vector<cplx> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const cplx t = 1.0 - (j < model.n1() ? s1 : s2);
      a[i * n + j] = (i == j ? 1.0 : 0.0) + model.a() * model.sigma()(i, j) * t;
    }
  return complex_det(std::move(a), n);
}

}  // namespace

double transform_coefficient(const CovarianceModel& model, unsigned k, unsigned m, unsigned nodes) {
  if (nodes < 2 * std::max(k, m) + 2) throw InvalidArgument("transform_coefficient: too few nodes");
  // det(I + a Sigma (I - S)) = det(I + a Sigma) det(I - Q S); every eigenvalue
  // of Q S has modulus <= r, so each factor of det(I - Q S) has argument below
  // asin(r) and the product stays off the negative real axis.
  const double n = std::max(2.0, static_cast<double>(model.dim()));
  const double r = std::min(0.5, 0.9 * std::sin(std::numbers::pi / n));
  const double log_scale = std::log(std::real(transform_det(model, 0.0, 0.0)));

  cplx acc = 0.0;
  for (unsigned j = 0; j < nodes; ++j) {
    const cplx w1 = std::polar(1.0, 2.0 * std::numbers::pi * j / nodes);
    for (unsigned l = 0; l < nodes; ++l) {
      const cplx w2 = std::polar(1.0, 2.0 * std::numbers::pi * l / nodes);
      const cplx ratio = transform_det(model, r * w1, r * w2) / std::exp(cplx(log_scale));
      const cplx f = -std::log(ratio);
      acc += f * std::pow(w1, -static_cast<int>(k)) * std::pow(w2, -static_cast<int>(m));
    }
  }
  acc /= static_cast<double>(nodes) * nodes;
  const double coefficient = std::real(acc) / std::pow(r, static_cast<int>(k + m));
  if (k == 0 && m == 0) return coefficient - log_scale;
  return coefficient;
}

}  // namespace idsq::cli
