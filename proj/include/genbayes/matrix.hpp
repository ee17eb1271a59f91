#ifndef GENBAYES_MATRIX_HPP_
#define GENBAYES_MATRIX_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "genbayes/errors.hpp"

namespace genbayes {

// Dense row-major matrix of doubles.  Constructors enforce
// data.size() == rows * cols; element access is unchecked in release
// paths, checked via at().
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}

  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("Matrix(" + std::to_string(rows_) + "x" +
                           std::to_string(cols_) + ") needs " +
                           std::to_string(rows_ * cols_) + " entries, got " +
                           std::to_string(data_.size()));
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double& at(std::size_t i, std::size_t j) {
    check_index(i, j);
    return data_[i * cols_ + j];
  }
  double at(std::size_t i, std::size_t j) const {
    check_index(i, j);
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) {
    return std::span<double>(data_.data() + i * cols_, cols_);
  }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_.data() + i * cols_, cols_);
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool all_finite() const {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  void require_finite(const std::string& what) const {
    if (!all_finite()) throw NumericError(what + " contains a non-finite entry");
  }

  // y = A x
  std::vector<double> multiply(std::span<const double> x) const {
    if (x.size() != cols_) {
      throw DimensionError("Matrix multiply: " + std::to_string(rows_) + "x" +
                           std::to_string(cols_) + " applied to vector of length " +
                           std::to_string(x.size()));
    }
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* w = data_.data() + i * cols_;
      double acc = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) acc += w[j] * x[j];
      y[i] = acc;
    }
    return y;
  }

 private:
  void check_index(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) {
      throw DimensionError("Matrix index (" + std::to_string(i) + "," +
                           std::to_string(j) + ") out of " + std::to_string(rows_) +
                           "x" + std::to_string(cols_));
    }
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

inline bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace genbayes

#endif  // GENBAYES_MATRIX_HPP_
