#pragma once

#include "idsq/matrix.hpp"

namespace idsq {

// Pivot tolerance used by the positive-definiteness test: 1e-12 * trace/dim.
double cholesky_pivot_tolerance(const SymMatrix& m);

// Lower-triangular L with L L^T = m. Throws NotPositiveDefinite when a pivot
// is at or below cholesky_pivot_tolerance(m).
Matrix cholesky(const SymMatrix& m);

bool is_positive_definite(const SymMatrix& m);

// Inverse of a positive definite matrix via its Cholesky factor.
SymMatrix inverse_spd(const SymMatrix& m);

// log det(m) = 2 * sum(log L_ii).
double log_det_spd(const SymMatrix& m);

// Solves L y = b for lower-triangular L, in place.
void forward_substitute(const Matrix& lower, std::span<double> b);

}  // namespace idsq
