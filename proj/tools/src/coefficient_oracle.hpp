#pragma once

#include "idsq/model.hpp"

namespace idsq::cli {

// Taylor coefficient of s1^k s2^m in -log det(I + a Sigma (I - S)), which is
// 2 log of the Laplace transform, extracted by a Cauchy integral: trapezoid
// rule with `nodes` points on each circle |s1| = |s2| = r. Determinants use a
// complex LU factorization; r is 0.5 or less so the logarithm stays on its
// principal branch. Equals trace_sum(k, m) / (k + m) for k + m >= 1.
double transform_coefficient(const CovarianceModel& model, unsigned k, unsigned m,
                             unsigned nodes = 64);

}  // namespace idsq::cli
