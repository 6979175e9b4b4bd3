#pragma once

#include <cstdint>
#include <optional>

#include "idsq/model.hpp"

namespace idsq {

// Dual variables (s1, s2), each in [0, 1). Throws InvalidArgument otherwise.
class DualPoint {
 public:
  DualPoint(double s1, double s2);

  double s1() const { return s1_; }
  double s2() const { return s2_; }

 private:
  double s1_;
  double s2_;
};

// E exp{-(a/2)((1 - s1)|X|^2 + (1 - s2)|Y|^2)} = det(I + a Sigma (I - S))^{-1/2}
// with S = diag(s1 I_{n1}, s2 I_{n2}).
double laplace_closed(const CovarianceModel& model, const DualPoint& p);

// The same determinant formula for any s1, s2 <= 1 (s = 1 included).
// Throws InvalidArgument for s > 1.
double laplace_closed_at(const CovarianceModel& model, double s1, double s2);

struct SeriesResult {
  double value = 0.0;
  // Bound on |value - laplace_closed|.
  double error_bound = 0.0;
  // lambda_max(Q) * max(s1, s2), which bounds the spectral radius of Q S.
  double rho = 0.0;
  unsigned terms = 0;
};

inline constexpr unsigned kMaxSeriesTerms = 10000;

// Smallest n >= 1 with rho^{n+1} / ((n+1)(1 - rho)) < 1e-10, capped at
// kMaxSeriesTerms.
unsigned auto_series_terms(double rho);

// exp(0.5 * (log det(I - Q) + sum_{n=1}^{nmax} trace((Q S)^n) / n)).
// Without nmax the length comes from auto_series_terms.
// Throws CapExceeded if nmax > kMaxSeriesTerms.
SeriesResult laplace_series(const CovarianceModel& model, const DualPoint& p,
                            std::optional<unsigned> nmax = std::nullopt);

struct MonteCarloResult {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
};

inline constexpr std::uint64_t kMonteCarloShard = 65536;

// Sample mean of the transform integrand over Gaussian draws X = L Z, L the
// Cholesky factor of Sigma. Samples are split into fixed shards of
// kMonteCarloShard draws, each with a seed derived from (seed, shard index),
// and merged in shard order, so the result does not depend on `threads`.
// Throws InvalidArgument if samples < 1000, NotPositiveDefinite.
MonteCarloResult monte_carlo(const CovarianceModel& model, const DualPoint& p, std::uint64_t samples,
                             std::uint64_t seed, unsigned threads = 1);

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace idsq
