#ifndef GENBAYES_GRAD_CHECK_HPP_
#define GENBAYES_GRAD_CHECK_HPP_

#include <functional>
#include <span>
#include <vector>

#include "genbayes/mlp.hpp"

namespace genbayes::nn {

// A scalar loss of the network output, with its gradient, for verifying
// hand-written backward passes against central finite differences.
struct ScalarLoss {
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> grad;
};

// Max over all parameters of |analytic - numeric| / max(1, |analytic| + |numeric|)
// with numeric = central difference of the loss at +-step.  Throws
// NumericError if any analytic gradient is non-finite.
double grad_check(const Mlp& net, const ScalarLoss& loss,
                  std::span<const double> input, double step);

}  // namespace genbayes::nn

#endif  // GENBAYES_GRAD_CHECK_HPP_
