#pragma once

#include <cstdint>
#include <random>

#include "idsq/matrix.hpp"
#include "idsq/model.hpp"

namespace idsq::cli {

// G^T G / ||G^T G||_2 + 1e-3 I with G standard normal (n x n), rescaled to
// unit spectral radius. Eigenvalues lie in (0, 1].
SymMatrix random_unit_pd(std::mt19937_64& gen, std::size_t n);

// random_unit_pd partitioned as (n1, n2), drawn from a generator seeded with
// `seed`.
BlockMatrix random_resolvent(std::uint64_t seed, std::size_t n1, std::size_t n2);

// Covariance model with Sigma = G^T G / n + 0.1 I (well conditioned, not
// normalized) and the given tilt.
CovarianceModel random_model(std::uint64_t seed, std::size_t n1, std::size_t n2, double a);

}  // namespace idsq::cli
