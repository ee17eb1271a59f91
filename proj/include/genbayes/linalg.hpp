#ifndef GENBAYES_LINALG_HPP_
#define GENBAYES_LINALG_HPP_

#include <span>
#include <vector>

#include "genbayes/matrix.hpp"

namespace genbayes::linalg {

// Lower Cholesky factor of a symmetric positive-definite matrix.
// Throws ValueError when the matrix is not positive definite (the
// rank-deficiency signal for the OLS paths built on top).
Matrix cholesky(const Matrix& a);

// Solves L L^T x = b given the lower factor.
std::vector<double> cholesky_solve(const Matrix& L, std::span<const double> b);

// (L L^T)^{-1} from the lower factor.
Matrix cholesky_inverse(const Matrix& L);

struct OlsFit {
  std::vector<double> beta;
  Matrix xtx_inverse;  // (X^T X)^{-1}, for standard errors
  double rss = 0.0;
};

// Ordinary least squares of y on the columns of X via normal equations.
OlsFit ols(const Matrix& X, std::span<const double> y);

}  // namespace genbayes::linalg

#endif  // GENBAYES_LINALG_HPP_
