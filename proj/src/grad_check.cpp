#include "genbayes/grad_check.hpp"

#include <cmath>

#include "genbayes/errors.hpp"

namespace genbayes::nn {

namespace {

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max(1.0, std::abs(analytic) + std::abs(numeric));
}

}  // namespace

double grad_check(const Mlp& net, const ScalarLoss& loss,
                  std::span<const double> input, double step) {
  if (!(step > 0.0)) throw ValueError("grad_check: step must be > 0");

  const ForwardTrace trace = forward(net, input);
  const std::vector<double> gout = loss.grad(trace.output());
  const Gradients analytic = backward(net, trace, gout);

  for (const auto& w : analytic.d_weights) {
    if (!w.all_finite()) throw NumericError("grad_check: non-finite analytic gradient");
  }
  for (const auto& b : analytic.d_bias) {
    if (!all_finite(b)) throw NumericError("grad_check: non-finite analytic gradient");
  }

  Mlp work = net;
  auto eval = [&]() { return loss.value(forward(work, input).output()); };

  double max_err = 0.0;
  auto probe = [&](double& param, double analytic_g) {
    const double saved = param;
    param = saved + step;
    const double up = eval();
    param = saved - step;
    const double down = eval();
    param = saved;
    const double numeric = (up - down) / (2.0 * step);
    max_err = std::max(max_err, relative_error(analytic_g, numeric));
  };

  for (std::size_t l = 0; l < work.num_layers(); ++l) {
    auto& layer = work.layers()[l];
    for (std::size_t i = 0; i < layer.weights.size(); ++i) {
      probe(layer.weights.data()[i], analytic.d_weights[l].data()[i]);
    }
    for (std::size_t i = 0; i < layer.bias.size(); ++i) {
      probe(layer.bias[i], analytic.d_bias[l][i]);
    }
  }
  return max_err;
}

}  // namespace genbayes::nn
