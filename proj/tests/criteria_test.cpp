#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "idsq/cholesky.hpp"
#include "idsq/criteria.hpp"
#include "idsq/eigen.hpp"
#include "idsq/error.hpp"
#include "idsq/tracesum.hpp"
#include "sampling.hpp"
#include "support.hpp"

namespace idsq {
namespace {

using cli::random_resolvent;

// Resolvent or precision family on a diagonally dominant base, scaled to unit
// spectral radius; positive definite for all delta, epsilon in (0, 1].
BlockMatrix family(DeltaEpsilonFamily::Kind kind, double delta, double epsilon) {
  return scale_to_unit_spectral_radius(materialize({kind, {5.0, 4.0, 5.0, 4.0}, delta, epsilon}));
}

CovarianceModel precision_model(double delta, double epsilon) {
  const BlockMatrix p = family(DeltaEpsilonFamily::Kind::Precision, delta, epsilon);
  return {inverse_spd(p.full()), 2, 2, 1.0};
}

double max_offdiag(const Matrix& m) {
  double r = -INFINITY;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != j) r = std::max(r, m(i, j));
  return r;
}

TEST(SignatureMatrix, RejectsNonOrthogonalBlocks) {
  EXPECT_THROW(SignatureMatrix(Matrix{{1.0, 0.1}, {0.0, 1.0}}, Matrix::identity(2)), InvalidArgument);
  EXPECT_THROW(SignatureMatrix(Matrix(2, 3), Matrix::identity(2)), InvalidArgument);
  const SignatureMatrix u = SignatureMatrix::identity(2, 3);
  EXPECT_EQ(u.full(), Matrix::identity(5));
  EXPECT_EQ(u.orthogonality_error(), 0.0);
}

TEST(SignatureMatrix, ReorthonormalizationTightensOrthogonality) {
  const double t = 0.3;
  const Matrix r{{std::cos(t) * (1 + 1e-11), -std::sin(t)}, {std::sin(t), std::cos(t)}};
  const SignatureMatrix u(r, Matrix::identity(2));
  EXPECT_LE(u.reorthonormalized().orthogonality_error(), 1e-15);
}

TEST(BlockDiagonalize, AlreadyDiagonalSortedIsFixed) {
  const BlockMatrix a(SymMatrix{{3.0, 0.0, 0.2, 0.1}, {0.0, 1.0, 0.1, 0.3}, {0.2, 0.1, 5.0, 0.0}, {0.1, 0.3, 0.0, 2.0}}, 2);
  const BlockDiagonalization bd = block_diagonalize(a);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(std::abs(bd.w.u1()(i, i)), 1.0);
    EXPECT_EQ(std::abs(bd.w.u2()(i, i)), 1.0);
  }
  const Matrix signs = bd.w.full();
  EXPECT_LE(max_abs_diff(bd.rotated.full().matrix(), signs * a.full().matrix() * signs), 1e-15);
}

TEST(BlockDiagonalize, SortsDiagonalBlocks) {
  const BlockMatrix a(SymMatrix{{1.0, 0.0, 0.1, 0.0}, {0.0, 3.0, 0.0, 0.1}, {0.1, 0.0, 2.0, 0.0}, {0.0, 0.1, 0.0, 5.0}}, 2);
  const BlockMatrix r = block_diagonalize(a).rotated;
  EXPECT_EQ(r.b11(), Matrix::diagonal({3.0, 1.0}));
  EXPECT_EQ(r.b22(), Matrix::diagonal({5.0, 2.0}));
}

TEST(BlockDiagonalize, RandomInputsBecomeBlockDiagonal) {
  for (unsigned t = 0; t < 200; ++t) {
    const BlockMatrix a = random_resolvent(t, 2 + t % 2, 2);
    const BlockDiagonalization bd = block_diagonalize(a);
    EXPECT_LE(bd.rotated.b11().max_abs_off_diagonal(), 1e-10);
    EXPECT_LE(bd.rotated.b22().max_abs_off_diagonal(), 1e-10);
    for (std::size_t i = 0; i < a.dim(); ++i) EXPECT_GT(bd.rotated.full()(i, i), 0.0);
    for (std::size_t i = 1; i < a.n1(); ++i) EXPECT_GE(bd.rotated.full()(i - 1, i - 1), bd.rotated.full()(i, i));
  }
  EXPECT_THROW(block_diagonalize(BlockMatrix(SymMatrix::diagonal({1.0, -1.0, 1.0, 1.0}), 2)), NotPositiveDefinite);
}

TEST(NonnegativeSignatureCheck, ResolventFamilyTruthTable) {
  for (double delta : {0.05, 0.2, 0.5, 1.0})
    for (double epsilon : {0.05, 0.2, 0.5, 1.0}) {
      if (delta == epsilon) continue;
      const CriterionReport r = nonnegative_signature_check(family(DeltaEpsilonFamily::Kind::Resolvent, delta, epsilon));
      EXPECT_EQ(r.holds, delta <= epsilon) << delta << " " << epsilon;
      EXPECT_EQ(r.witness.has_value(), r.holds);
    }
}

TEST(NonnegativeSignatureCheck, EqualParametersTieHolds) {
  const CriterionReport r = nonnegative_signature_check(family(DeltaEpsilonFamily::Kind::Resolvent, 0.3, 0.3));
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.detail.at("v11"), 1.0);
  EXPECT_EQ(r.detail.at("v21"), 0.0);
}

TEST(NonnegativeSignatureCheck, ZeroCouplingHolds) {
  const CriterionReport r = nonnegative_signature_check(BlockMatrix(SymMatrix::diagonal({4.0, 3.0, 2.0, 1.0}), 2));
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.detail.at("quantity"), 0.0);
}

TEST(NonnegativeSignatureCheck, ShapeContract) {
  EXPECT_THROW(nonnegative_signature_check(random_resolvent(1, 2, 3)), ShapeError);
  EXPECT_THROW(word_trace_condition(random_resolvent(1, 1, 3)), ShapeError);
}

TEST(NonnegativeSignatureCheck, TiedDiagonalUsesFreeRotation) {
  // a33 == a44: the second block can rotate freely, so the condition holds.
  const BlockMatrix a(SymMatrix{{1.0, 0.0, 0.1, 0.1}, {0.0, 0.5, 0.1, -0.3}, {0.1, 0.1, 0.8, 0.0}, {0.1, -0.3, 0.0, 0.8}}, 2);
  const CriterionReport r = nonnegative_signature_check(a);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.detail.at("tie_rule_applied"), 1.0);
  ASSERT_TRUE(r.witness);
  EXPECT_GE(r.witness->conjugate(a.full().matrix()).min_entry(), -1e-12);
}

TEST(ConstructNonnegSignature, NonnegativeCouplingNeedsOnlySigns) {
  const BlockMatrix a(SymMatrix{{3.0, 0.0, 0.2, 0.1}, {0.0, 1.0, 0.1, 0.3}, {0.2, 0.1, 5.0, 0.0}, {0.1, 0.3, 0.0, 2.0}}, 2);
  const SignatureMatrix u = construct_nonneg_signature(a);
  for (const Matrix* b : {&u.u1(), &u.u2()}) {
    EXPECT_EQ(std::abs((*b)(0, 0)) + std::abs((*b)(0, 1)), 1.0);
    EXPECT_EQ(std::abs((*b)(1, 0)) + std::abs((*b)(1, 1)), 1.0);
  }
  EXPECT_GE(u.conjugate(a.full().matrix()).min_entry(), 0.0);
}

TEST(ConstructNonnegSignature, ExplicitNormalizedCase) {
  // Coupling [[a13, a14], [a23, -a24]] with a13 a23 - a14 a24 >= 0.
  const BlockMatrix a(SymMatrix{{1.0, 0.0, 0.3, 0.1}, {0.0, 0.5, 0.3, -0.1}, {0.3, 0.3, 1.0, 0.0}, {0.1, -0.1, 0.0, 0.5}}, 2);
  ASSERT_TRUE(is_positive_definite(a.full()));
  const SignatureMatrix u = construct_nonneg_signature(a);
  EXPECT_LE(max_abs_diff(u.u1(), Matrix::identity(2)), 1e-15);
  const Matrix c = u.conjugate(a.full().matrix());
  EXPECT_NEAR(c(1, 2), 0.0, 1e-15);
  EXPECT_GE(c.min_entry(), -1e-15);
  EXPECT_LE(u.orthogonality_error(), 1e-15);
}

TEST(ConstructNonnegSignature, SingularVectorCase) {
  // a13 a23 - a14 a24 < 0 after the sign reduction.
  const BlockMatrix a(SymMatrix{{1.0, 0.0, 0.1, 0.3}, {0.0, 0.5, 0.2, -0.1}, {0.1, 0.2, 1.0, 0.0}, {0.3, -0.1, 0.0, 0.5}}, 2);
  ASSERT_TRUE(is_positive_definite(a.full()));
  const CriterionReport r = nonnegative_signature_check(a);
  ASSERT_TRUE(r.holds);
  const Matrix c = r.witness->conjugate(a.full().matrix());
  EXPECT_GE(c.min_entry(), -1e-12);
  EXPECT_NEAR(c(0, 3), 0.0, 1e-12);
  EXPECT_NEAR(c(1, 2), 0.0, 1e-12);
}

TEST(ConstructNonnegSignature, PreconditionViolated) {
  EXPECT_THROW(construct_nonneg_signature(family(DeltaEpsilonFamily::Kind::Resolvent, 0.5, 0.1)), PreconditionViolated);
}

TEST(NonnegativeSignature, EquivalencesOnRandomInstances) {
  unsigned holding = 0, failing = 0;
  for (unsigned t = 0; t < 400; ++t) {
    const BlockMatrix a = random_resolvent(1000 + t, 2, 2);
    const CriterionReport r = nonnegative_signature_check(a);
    if (r.holds) {
      ++holding;
      ASSERT_TRUE(r.witness);
      EXPECT_GE(r.witness->conjugate(a.full().matrix()).min_entry(), -1e-10);
      EXPECT_LE(r.witness->orthogonality_error(), 1e-12);
      if (t % 4 != 0) continue;
      for (unsigned deg = 1; deg <= 8; ++deg)
        for (unsigned k = 0; k <= deg; ++k) EXPECT_GE(trace_sum_oracle(a, {k, deg - k}).min_term, -1e-10);
    } else {
      ++failing;
      const auto hit = limiting_word_search(a);
      ASSERT_TRUE(hit) << t;
      EXPECT_LT(hit->normalized_trace, 0.0);
      EXPECT_LT(normalized_limiting_word(a, hit->K), 0.0);
    }
  }
  EXPECT_GT(holding, 0u);
  EXPECT_GT(failing, 0u);
}

TEST(WordTraceCondition, ReferenceMatrixFails) {
  const CriterionReport r = word_trace_condition(materialize(reference_family()));
  EXPECT_FALSE(r.holds);
  EXPECT_LT(r.detail.at("quantity"), 0.0);
  EXPECT_EQ(r.criterion, Criterion::WordTraceSign);
}

TEST(WordTraceCondition, SmallDeltaHoldsAndZeroCouplingHolds) {
  DeltaEpsilonFamily f = reference_family();
  f.delta = 0.005;
  EXPECT_TRUE(word_trace_condition(materialize(f)).holds);
  EXPECT_TRUE(word_trace_condition(BlockMatrix(SymMatrix::diagonal({0.9, 0.5, 0.7, 0.2}), 2)).holds);
}

TEST(LimitingWord, ReferenceMatrixTurnsNegative) {
  const BlockMatrix q = materialize(reference_family());
  const auto hit = limiting_word_search(q);
  ASSERT_TRUE(hit);
  EXPECT_LE(hit->K, 200u);
  EXPECT_NEAR(normalized_limiting_word(q, hit->K), hit->normalized_trace, 1e-9);
  EXPECT_FALSE(limiting_word_search(family(DeltaEpsilonFamily::Kind::Resolvent, 0.1, 0.5)));
}

TEST(NonpositiveOffdiagSignature, DiagonalInputUsesTrivialWitness) {
  const BlockMatrix a(SymMatrix::diagonal({4.0, 3.0, 2.0, 1.0}), 2);
  const auto u = construct_nonpositive_offdiag_signature(a);
  ASSERT_TRUE(u);
  EXPECT_LE(max_offdiag(u->conjugate(a.full().matrix())), 0.0);
}

TEST(NonpositiveOffdiagSignature, PrecisionFamily) {
  for (double delta : {0.1, 0.4, 0.9})
    for (double epsilon : {0.1, 0.4, 0.9}) {
      if (delta == epsilon) continue;
      const BlockMatrix p = family(DeltaEpsilonFamily::Kind::Precision, delta, epsilon);
      const auto u = construct_nonpositive_offdiag_signature(p);
      EXPECT_EQ(u.has_value(), delta <= epsilon);
      if (u) EXPECT_LE(max_offdiag(u->conjugate(p.full().matrix())), 1e-10);
    }
}

TEST(NonpositiveOffdiagSignature, WitnessExistsExactlyWhenInequalityHolds) {
  unsigned present = 0, absent = 0;
  for (unsigned t = 0; t < 400; ++t) {
    const BlockMatrix a = random_resolvent(5000 + t, 2, 2);
    const double quantity = nonpositive_offdiag_quantity(a);
    const auto u = construct_nonpositive_offdiag_signature(a);
    const double scale = a.b12().max_abs();
    if (std::abs(quantity) <= 1e-12 * scale * scale) continue;
    EXPECT_EQ(u.has_value(), quantity > 0.0);
    if (u) {
      ++present;
      EXPECT_LE(max_offdiag(u->conjugate(a.full().matrix())), 1e-10);
      EXPECT_LE(u->orthogonality_error(), 1e-12);
    } else {
      ++absent;
    }
  }
  EXPECT_GT(present, 0u);
  EXPECT_GT(absent, 0u);
}

TEST(PrecisionSignatureCheck, Examples) {
  const CriterionReport id = precision_signature_check({SymMatrix::identity(4), 2, 2, 1.0});
  EXPECT_TRUE(id.holds);
  EXPECT_TRUE(id.witness);

  EXPECT_FALSE(precision_signature_check(precision_model(0.6, 0.2)).holds);
  const CriterionReport ok = precision_signature_check(precision_model(0.2, 0.6));
  EXPECT_TRUE(ok.holds);
  EXPECT_EQ(ok.detail.at("witness_exists"), 1.0);

  EXPECT_THROW(precision_signature_check({SymMatrix::identity(5), 2, 3, 1.0}), ShapeError);
}

TEST(GriffithsBapat, TwoDimensionalAlwaysHolds) {
  std::mt19937_64 gen(77);
  for (int t = 0; t < 50; ++t) {
    const CriterionReport r = griffiths_bapat_check(testing::random_spd(gen, 2));
    EXPECT_TRUE(r.holds);
    EXPECT_EQ(r.signs.size(), 2u);
    EXPECT_EQ(r.signs[0], 1);
  }
}

TEST(GriffithsBapat, PrecisionFamilyNeverHolds) {
  for (double delta : {0.1, 0.5, 1.0})
    for (double epsilon : {0.1, 0.5, 1.0}) EXPECT_FALSE(griffiths_bapat_check(precision_model(delta, epsilon).sigma()).holds);
}

TEST(GriffithsBapat, MMatrixInverseHoldsWithIdentitySigns) {
  const SymMatrix p{{2.0, -0.5, -0.3}, {-0.5, 2.0, -0.4}, {-0.3, -0.4, 2.0}};
  const CriterionReport r = griffiths_bapat_check(inverse_spd(p));
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.signs, (std::vector<int>{1, 1, 1}));
}

TEST(GriffithsBapat, InvariantUnderSignConjugation) {
  std::mt19937_64 gen(78);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 3 + t % 3;
    SymMatrix sigma = testing::random_spd(gen, n);
    if (t % 2 == 0) {
      // M-matrix inverse with random signs so that some instances hold.
      Matrix p = Matrix::identity(n) * static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) p(i, j) = p(j, i) = -std::abs(sigma(i, j)) * 0.5;
      sigma = inverse_spd(SymMatrix(p));
    }
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = gen() % 2 ? 1.0 : -1.0;
    const Matrix dm = Matrix::diagonal(d);
    const SymMatrix flipped(dm * sigma.matrix() * dm);
    EXPECT_EQ(griffiths_bapat_check(sigma).holds, griffiths_bapat_check(flipped).holds);
    if (t % 2 == 0) EXPECT_TRUE(griffiths_bapat_check(flipped).holds);
  }
}

TEST(GriffithsBapat, CapAt20) {
  EXPECT_THROW(griffiths_bapat_check(SymMatrix::identity(21)), CapExceeded);
  EXPECT_TRUE(griffiths_bapat_check(SymMatrix::identity(12)).holds);
}

TEST(Shanbhag, RandomModelsHold) {
  std::mt19937_64 gen(90);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n2 = 1 + t % 6;
    const CriterionReport r = shanbhag_check({testing::random_spd(gen, 1 + n2), 1, n2, 2.0});
    EXPECT_TRUE(r.holds);
    EXPECT_GE(r.detail.at("min_term"), -1e-12);
    EXPECT_GT(r.detail.at("q11"), 0.0);
    EXPECT_EQ(r.detail.at("terms_nonnegative"), 1.0);
  }
}

TEST(Shanbhag, DiagonalCovarianceGivesZeroTerms) {
  const CriterionReport r = shanbhag_check({SymMatrix::diagonal({1.0, 2.0, 3.0, 4.0}), 1, 3, 1.0});
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.detail.at("min_term"), 0.0);
}

TEST(Shanbhag, ShapeContract) {
  EXPECT_THROW(shanbhag_check({SymMatrix::identity(4), 2, 2, 1.0}), ShapeError);
}

}  // namespace
}  // namespace idsq
