#include "idsq/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "idsq/cholesky.hpp"
#include "idsq/eigen.hpp"
#include "idsq/error.hpp"
#include "idsq/parallel.hpp"

namespace idsq {

namespace {

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    const double total = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / total;
    m2 += o.m2 + d * d * n * o.n / total;
    n = total;
  }
};

}  // namespace

DualPoint::DualPoint(double s1, double s2) : s1_(s1), s2_(s2) {
  if (!(s1 >= 0.0 && s1 < 1.0) || !(s2 >= 0.0 && s2 < 1.0))
    throw InvalidArgument("dual point components must lie in [0, 1)");
}

double laplace_closed_at(const CovarianceModel& model, double s1, double s2) {
  if (!(s1 <= 1.0) || !(s2 <= 1.0)) throw InvalidArgument("laplace_closed_at: s must be <= 1");
  const std::size_t n = model.dim();
  std::vector<double> root(n);
  for (std::size_t i = 0; i < n; ++i) root[i] = std::sqrt(1.0 - (i < model.n1() ? s1 : s2));
  Matrix m = Matrix::identity(n);
  const SymMatrix& sigma = model.sigma();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) += model.a() * root[i] * sigma(i, j) * root[j];
  return std::exp(-0.5 * log_det_spd(SymMatrix(m)));
}

double laplace_closed(const CovarianceModel& model, const DualPoint& p) {
  return laplace_closed_at(model, p.s1(), p.s2());
}

unsigned auto_series_terms(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw InvalidArgument("auto_series_terms: rho must lie in [0, 1)");
  if (rho == 0.0) return 1;
  double pw = rho * rho;
  for (unsigned n = 1; n < kMaxSeriesTerms; ++n) {
    if (pw / ((n + 1) * (1.0 - rho)) < 1e-10) return n;
    pw *= rho;
  }
  return kMaxSeriesTerms;
}

SeriesResult laplace_series(const CovarianceModel& model, const DualPoint& p, std::optional<unsigned> nmax) {
  if (nmax && *nmax > kMaxSeriesTerms) throw CapExceeded("laplace_series: nmax exceeds 10^4");
  const BlockMatrix q = build_q(model);
  const std::size_t n = q.dim();

  SeriesResult r;
  r.rho = largest_eigenvalue(q.full()) * std::max(p.s1(), p.s2());
  r.terms = nmax ? *nmax : auto_series_terms(r.rho);

  Matrix qs = q.full().matrix();
  for (std::size_t i = 0; i < n; ++i) {
    const double s = i < q.n1() ? p.s1() : p.s2();
    for (std::size_t j = 0; j < n; ++j) qs(j, i) *= s;
  }

  const SymMatrix complement(Matrix::identity(n) - q.full().matrix());
  double log_sum = log_det_spd(complement);
  Matrix pw = qs;
  for (unsigned k = 1; k <= r.terms; ++k) {
    log_sum += pw.trace() / k;
    if (k < r.terms) pw = pw * qs;
  }
  r.value = std::exp(0.5 * log_sum);

  if (r.rho > 0.0) {
    const double tail = static_cast<double>(n) * std::pow(r.rho, r.terms + 1.0) /
                        ((r.terms + 1.0) * (1.0 - r.rho));
    r.error_bound = r.value * std::expm1(0.5 * tail);
  }
  return r;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

MonteCarloResult monte_carlo(const CovarianceModel& model, const DualPoint& p, std::uint64_t samples,
                             std::uint64_t seed, unsigned threads) {
  if (samples < 1000) throw InvalidArgument("monte_carlo: at least 1000 samples are required");
  const Matrix lower = cholesky(model.sigma());
  const std::size_t n = model.dim();
  const std::size_t n1 = model.n1();
  const double w1 = 0.5 * model.a() * (1.0 - p.s1());
  const double w2 = 0.5 * model.a() * (1.0 - p.s2());

  const std::uint64_t shards = (samples + kMonteCarloShard - 1) / kMonteCarloShard;
  std::vector<Moments> parts(shards);
  parallel_for(shards, threads, [&](std::size_t shard) {
    std::mt19937_64 gen(mix_seed(seed, shard));
    std::normal_distribution<double> normal;
    const std::uint64_t begin = shard * kMonteCarloShard;
    const std::uint64_t end = std::min(samples, begin + kMonteCarloShard);
    std::vector<double> z(n);
    Moments m;
    for (std::uint64_t s = begin; s < end; ++s) {
      for (double& v : z) v = normal(gen);
      double x2 = 0.0, y2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double xi = 0.0;
        for (std::size_t j = 0; j <= i; ++j) xi += lower(i, j) * z[j];
        (i < n1 ? x2 : y2) += xi * xi;
      }
      m.add(std::exp(-w1 * x2 - w2 * y2));
    }
    parts[shard] = m;
  });

  Moments total;
  for (const Moments& m : parts) total.merge(m);
  MonteCarloResult r;
  r.samples = samples;
  r.estimate = total.mean;
  r.standard_error = std::sqrt(total.m2 / (total.n - 1.0) / total.n);
  return r;
}

}  // namespace idsq
