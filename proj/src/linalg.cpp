#include "genbayes/linalg.hpp"

#include <cmath>

namespace genbayes::linalg {

Matrix cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionError("cholesky: matrix must be square");
  Matrix L(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= L(i, k) * L(j, k);
      if (i == j) {
        if (!(sum > 0.0)) {
          throw ValueError("cholesky: matrix not positive definite (rank deficient)");
        }
        L(i, j) = std::sqrt(sum);
      } else {
        L(i, j) = sum / L(j, j);
      }
    }
  }
  return L;
}

std::vector<double> cholesky_solve(const Matrix& L, std::span<const double> b) {
  const std::size_t n = L.rows();
  if (b.size() != n) throw DimensionError("cholesky_solve: rhs length mismatch");
  std::vector<double> y(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = b[i];
    for (std::size_t k = 0; k < i; ++k) sum -= L(i, k) * y[k];
    y[i] = sum / L(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double sum = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) sum -= L(k, ii) * x[k];
    x[ii] = sum / L(ii, ii);
  }
  return x;
}

Matrix cholesky_inverse(const Matrix& L) {
  const std::size_t n = L.rows();
  Matrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const std::vector<double> col = cholesky_solve(L, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  return inv;
}

OlsFit ols(const Matrix& X, std::span<const double> y) {
  const std::size_t n = X.rows();
  const std::size_t p = X.cols();
  if (y.size() != n) throw DimensionError("ols: response length mismatch");
  if (n < p) throw ValueError("ols: fewer rows than columns");

  Matrix xtx(p, p);
  std::vector<double> xty(p, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = X.row(r);
    for (std::size_t i = 0; i < p; ++i) {
      xty[i] += row[i] * y[r];
      for (std::size_t j = i; j < p; ++j) xtx(i, j) += row[i] * row[j];
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < i; ++j) xtx(i, j) = xtx(j, i);
  }

  const Matrix L = cholesky(xtx);
  OlsFit fit;
  fit.beta = cholesky_solve(L, xty);
  fit.xtx_inverse = cholesky_inverse(L);
  fit.rss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = X.row(r);
    double pred = 0.0;
    for (std::size_t j = 0; j < p; ++j) pred += row[j] * fit.beta[j];
    const double e = y[r] - pred;
    fit.rss += e * e;
  }
  return fit;
}

}  // namespace genbayes::linalg
