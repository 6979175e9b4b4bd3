#include <gtest/gtest.h>

#include <random>

#include "idsq/cholesky.hpp"
#include "idsq/eigen.hpp"
#include "idsq/error.hpp"
#include "idsq/model.hpp"
#include "support.hpp"

namespace idsq {
namespace {

TEST(CovarianceModel, RejectsInvalidInput) {
  EXPECT_THROW(CovarianceModel(SymMatrix::identity(4), 2, 1, 1.0), InvalidArgument);
  EXPECT_THROW(CovarianceModel(SymMatrix::identity(4), 2, 2, 0.0), InvalidArgument);
  EXPECT_THROW(CovarianceModel(SymMatrix::identity(4), 0, 4, 1.0), InvalidArgument);
  EXPECT_THROW(CovarianceModel(SymMatrix::diagonal({1.0, -1.0}), 1, 1, 1.0), NotPositiveDefinite);
}

TEST(BuildQ, IdentityCovariance) {
  const BlockMatrix q = build_q({SymMatrix::identity(4), 2, 2, 1.0});
  EXPECT_LE(max_abs_diff(q.full().matrix(), 0.5 * Matrix::identity(4)), 1e-15);
}

TEST(BuildQ, DiagonalCovarianceMapsEigenvalues) {
  const BlockMatrix q = build_q({SymMatrix::diagonal({1.0, 2.0, 3.0, 4.0}), 2, 2, 2.0});
  EXPECT_LE(max_abs_diff(q.full().matrix(), Matrix::diagonal({2.0 / 3, 4.0 / 5, 6.0 / 7, 8.0 / 9})), 1e-15);
}

TEST(BuildQ, EigenvaluesFollowTheResolventMap) {
  std::mt19937_64 gen(17);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + t % 5;
    const double a = std::pow(10.0, t % 4);
    const CovarianceModel model(testing::random_spd(gen, n), 1 + t % (n - 1), n - 1 - t % (n - 1), a);
    const BlockMatrix q = build_q(model);
    const auto sigma_values = eigen_sym(model.sigma()).values;
    const auto q_values = eigen_sym(q.full()).values;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(q_values[i], a * sigma_values[i] / (1 + a * sigma_values[i]), 1e-10);
      EXPECT_GT(q_values[i], 0.0);
      EXPECT_LT(q_values[i], 1.0);
    }
    EXPECT_TRUE(is_positive_definite(q.full()));
    EXPECT_EQ(q.b12(), q.b21().transpose());
    // Q commutes with Sigma.
    const Matrix qs = q.full().matrix() * model.sigma().matrix();
    EXPECT_LE(max_abs_diff(qs, qs.transpose()), 1e-10 * std::max(1.0, qs.max_abs()));
  }
}

TEST(BuildQ, LargeTiltKeepsEigenvaluesBelowOne) {
  std::mt19937_64 gen(23);
  const BlockMatrix q = build_q({testing::random_spd(gen, 4), 2, 2, 1e3});
  for (double v : eigen_sym(q.full()).values) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(CovarianceFromQ, RoundTrip) {
  std::mt19937_64 gen(31);
  const CovarianceModel model(testing::random_spd(gen, 4), 2, 2, 3.0);
  const SymMatrix back = covariance_from_q(build_q(model), 3.0);
  EXPECT_LE(max_abs_diff(back.matrix(), model.sigma().matrix()), 1e-10);
}

TEST(Materialize, ReferenceMatrixEntries) {
  const BlockMatrix q = materialize(reference_family());
  const SymMatrix expected{{0.8, 0.0, 0.01, 0.01},
                           {0.0, 0.3, 0.01, -0.2},
                           {0.01, 0.01, 0.8, 0.0},
                           {0.01, -0.2, 0.0, 0.3}};
  EXPECT_EQ(q.full(), expected);
  EXPECT_EQ(q.n1(), 2u);
}

TEST(Materialize, OffDiagonalProduct) {
  DeltaEpsilonFamily f = reference_family();
  f.delta = 0.3;
  f.epsilon = 0.07;
  const BlockMatrix q = materialize(f);
  const double e = f.epsilon, d = f.delta;
  const Matrix expected{{2 * e * e, e * (e - d)}, {e * (e - d), e * e + d * d}};
  EXPECT_LE(max_abs_diff(q.b12() * q.b21(), expected), 1e-16);
}

TEST(Materialize, PrecisionFamilyIsSwapConjugateOfResolventFamily) {
  DeltaEpsilonFamily f{DeltaEpsilonFamily::Kind::Resolvent, {5.0, 4.0, 3.0, 2.0}, 0.4, 0.1};
  const BlockMatrix q = materialize(f);
  f.kind = DeltaEpsilonFamily::Kind::Precision;
  const BlockMatrix p = materialize(f);
  const Matrix swap{{0.0, 1.0}, {1.0, 0.0}};
  EXPECT_EQ(swap * p.b12() * swap, q.b12());
  EXPECT_EQ(p.full()(0, 2), -0.4);
}

TEST(DeltaEpsilonFamily, Validation) {
  DeltaEpsilonFamily f = reference_family();
  EXPECT_NO_THROW(f.validate());
  f.diagonal = {0.3, 0.3, 0.8, 0.3};
  EXPECT_THROW(f.validate(), InvalidArgument);
  f = reference_family();
  f.delta = 0.0;
  EXPECT_THROW(f.validate(), InvalidArgument);
  f = reference_family();
  f.diagonal = {0.8, 0.3, 0.2, 0.3};
  EXPECT_THROW(materialize(f), InvalidArgument);
}

TEST(ScaleToUnitSpectralRadius, Examples) {
  const BlockMatrix d(SymMatrix::diagonal({2.0, 4.0}), 1);
  EXPECT_EQ(scale_to_unit_spectral_radius(d).full(), SymMatrix::diagonal({0.5, 1.0}));

  const BlockMatrix once = scale_to_unit_spectral_radius(materialize(reference_family()));
  EXPECT_NEAR(largest_eigenvalue(once.full()), 1.0, 1e-12);
  const BlockMatrix twice = scale_to_unit_spectral_radius(once);
  EXPECT_LE(max_abs_diff(once.full().matrix(), twice.full().matrix()), 1e-15);

  EXPECT_THROW(scale_to_unit_spectral_radius(BlockMatrix(SymMatrix::diagonal({-1.0, -2.0}), 1)),
               DegenerateInput);
}

TEST(InvertBlocks, Examples) {
  EXPECT_EQ(invert_blocks({SymMatrix::identity(4), 2, 2, 1.0}).full(), SymMatrix::identity(4));
  const BlockMatrix inv = invert_blocks({SymMatrix::diagonal({2.0, 2.0, 4.0, 4.0}), 2, 2, 1.0});
  EXPECT_LE(max_abs_diff(inv.full().matrix(), Matrix::diagonal({0.5, 0.5, 0.25, 0.25})), 1e-15);
  std::mt19937_64 gen(2);
  const CovarianceModel model(testing::random_spd(gen, 5), 2, 3, 1.0);
  const BlockMatrix p = invert_blocks(model);
  EXPECT_EQ(p.n1(), 2u);
  EXPECT_LE(max_abs_diff(model.sigma().matrix() * p.full().matrix(), Matrix::identity(5)), 1e-10);
}

TEST(SwapBlocks, ExchangesRoles) {
  const BlockMatrix q = materialize(reference_family());
  const BlockMatrix s = swap_blocks(q);
  EXPECT_EQ(s.b11(), q.b22());
  EXPECT_EQ(s.b12(), q.b21());
  EXPECT_EQ(swap_blocks(s), q);
}

TEST(DefaultGrid, AscendingPositive) {
  const auto grid = default_a_grid();
  EXPECT_EQ(grid, (std::vector<double>{1.0, 10.0, 100.0, 1e3, 1e4}));
}

}  // namespace
}  // namespace idsq
