#ifndef GENBAYES_ERRORS_HPP_
#define GENBAYES_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace genbayes {

// Shape/dimension violations (wrong vector length, incompatible layers).
class DimensionError : public std::runtime_error {
 public:
  explicit DimensionError(const std::string& msg)
      : std::runtime_error("dimension error: " + msg) {}
};

// Invalid argument values (nonpositive rates, empty datasets, bad quantile levels).
class ValueError : public std::invalid_argument {
 public:
  explicit ValueError(const std::string& msg)
      : std::invalid_argument("value error: " + msg) {}
};

// Non-finite numbers where finite ones are required (NaN loss, Inf gradient).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg)
      : std::runtime_error("numeric error: " + msg) {}
};

// File I/O and serialization failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg)
      : std::runtime_error("io error: " + msg) {}
};

}  // namespace genbayes

#endif  // GENBAYES_ERRORS_HPP_
