#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "idsq/matrix.hpp"
#include "idsq/model.hpp"

namespace idsq::testing {

inline bool close_rel(double x, double y, double rel) {
  return std::abs(x - y) <= rel * std::max({std::abs(x), std::abs(y), 1e-300});
}

inline Matrix random_matrix(std::mt19937_64& gen, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = normal(gen);
  return m;
}

inline SymMatrix random_symmetric(std::mt19937_64& gen, std::size_t n) {
  const Matrix g = random_matrix(gen, n, n);
  return SymMatrix(g + g.transpose());
}

// G^T G / n + shift I.
inline SymMatrix random_spd(std::mt19937_64& gen, std::size_t n, double shift = 0.1) {
  const Matrix g = random_matrix(gen, n, n);
  return SymMatrix((g.transpose() * g) * (1.0 / static_cast<double>(n)) + shift * Matrix::identity(n));
}

// Zeroes the off-diagonal entries of both diagonal blocks of a 2 + 2 matrix.
inline BlockMatrix with_diagonal_blocks(const BlockMatrix& q) {
  Matrix m = q.full().matrix();
  m(0, 1) = m(1, 0) = 0.0;
  m(2, 3) = m(3, 2) = 0.0;
  return {SymMatrix(m), 2};
}

}  // namespace idsq::testing
