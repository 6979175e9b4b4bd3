#pragma once

#include <array>
#include <vector>

#include "idsq/matrix.hpp"

namespace idsq {

// Eigendecomposition of a symmetric matrix: values sorted descending, the
// i-th column of `vectors` belongs to values[i]. `vectors` is orthogonal.
struct SymEigen {
  std::vector<double> values;
  Matrix vectors;
};

// Cyclic Jacobi rotations. Throws InternalError if the sweep cap is reached.
SymEigen eigen_sym(const SymMatrix& m);

double largest_eigenvalue(const SymMatrix& m);
double smallest_eigenvalue(const SymMatrix& m);

// Closed-form eigenpair of a symmetric 2x2 matrix.
//
// Conventions:
//   * lambda1 >= lambda2;
//   * if the matrix is a multiple of the identity, v1 == (1, 0) exactly;
//   * v1 has v1[0] >= 0, and v1[1] > 0 whenever v1[0] == 0;
//   * v2 == (-v1[1], v1[0]).
struct EigenPair2 {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::array<double, 2> v1{1.0, 0.0};
  std::array<double, 2> v2{0.0, 1.0};
};

EigenPair2 eigen2(double a11, double a12, double a22);
EigenPair2 eigen2(const SymMatrix& m);

}  // namespace idsq
