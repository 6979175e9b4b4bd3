#include <benchmark/benchmark.h>

#include "commands.hpp"
#include "idsq/eigen.hpp"
#include "idsq/laplace.hpp"
#include "idsq/tracesum.hpp"
#include "sampling.hpp"

namespace {

using namespace idsq;

void BM_TraceSumOracle(benchmark::State& state) {
  const BlockMatrix q = cli::random_resolvent(1, 2, 2);
  const unsigned deg = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(trace_sum_oracle(q, {deg / 2, deg - deg / 2}).value);
}
BENCHMARK(BM_TraceSumOracle)->DenseRange(4, 12, 4);

void BM_TraceSumDp(benchmark::State& state) {
  const BlockMatrix q = cli::random_resolvent(1, 2, 2);
  const unsigned deg = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(trace_sum_dp(q, {deg / 2, deg - deg / 2}).value);
}
BENCHMARK(BM_TraceSumDp)->DenseRange(4, 12, 4)->Arg(60)->Arg(120);

void BM_Figure1Grid(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cli::figure1_grid(60).size());
}
BENCHMARK(BM_Figure1Grid)->Unit(benchmark::kMillisecond);

void BM_JacobiEigen(benchmark::State& state) {
  std::mt19937_64 gen(3);
  const SymMatrix m = cli::random_unit_pd(gen, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eigen_sym(m).values.front());
}
BENCHMARK(BM_JacobiEigen)->Arg(4)->Arg(8)->Arg(16);

void BM_MonteCarlo(benchmark::State& state) {
  const CovarianceModel model = cli::random_model(5, 2, 2, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(monte_carlo(model, {0.3, 0.6}, static_cast<std::uint64_t>(state.range(0)), 7).estimate);
}
BENCHMARK(BM_MonteCarlo)->Arg(65536)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
