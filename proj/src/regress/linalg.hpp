#pragma once

#include <span>
#include <vector>

#include "common/matrix.hpp"

namespace faasprof::linalg {

inline constexpr double kPivotTolerance = 1e-12;

// Solves A x = b by Gaussian elimination with partial pivoting. Throws
// NumericError when a pivot falls below kPivotTolerance relative to the
// largest entry of A.
std::vector<double> solve(Matrix a, std::vector<double> b);

// Lower-triangular L with A = L L^T; returns false if A is not positive definite.
bool cholesky(const Matrix& a, Matrix& lower);

// Solves L L^T x = b given the Cholesky factor.
std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b);

}  // namespace faasprof::linalg
