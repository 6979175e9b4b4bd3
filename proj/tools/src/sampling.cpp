#include "sampling.hpp"

#include "idsq/eigen.hpp"

namespace idsq::cli {

namespace {

Matrix gram(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> normal;
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = normal(gen);
  return g.transpose() * g;
}

}  // namespace

SymMatrix random_unit_pd(std::mt19937_64& gen, std::size_t n) {
  const SymMatrix g(gram(gen, n));
  const SymMatrix shifted(g.matrix() * (1.0 / largest_eigenvalue(g)) + 1e-3 * Matrix::identity(n));
  return shifted.scaled(1.0 / largest_eigenvalue(shifted));
}

BlockMatrix random_resolvent(std::uint64_t seed, std::size_t n1, std::size_t n2) {
  std::mt19937_64 gen(seed);
  return {random_unit_pd(gen, n1 + n2), n1};
}

CovarianceModel random_model(std::uint64_t seed, std::size_t n1, std::size_t n2, double a) {
  std::mt19937_64 gen(seed);
  const std::size_t n = n1 + n2;
  const SymMatrix sigma(gram(gen, n) * (1.0 / static_cast<double>(n)) + 0.1 * Matrix::identity(n));
  return {sigma, n1, n2, a};
}

}  // namespace idsq::cli
