#ifndef GENBAYES_LOSSES_HPP_
#define GENBAYES_LOSSES_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "genbayes/errors.hpp"

namespace genbayes::nn {

// Scalar losses as (value, gradient-w.r.t.-prediction) pairs.  Subgradient
// conventions at kinks are fixed so training is deterministic:
//   relu'(0) = 0 (activations.hpp), pinball slope at e = 0 is q.

inline double mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw DimensionError("mse_loss: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - target[i];
    acc += e * e;
  }
  return acc / static_cast<double>(pred.size());
}

inline std::vector<double> mse_loss_grad(std::span<const double> pred,
                                         std::span<const double> target) {
  if (pred.size() != target.size()) throw DimensionError("mse_loss_grad: size mismatch");
  std::vector<double> g(pred.size());
  const double scale = 2.0 / static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) g[i] = scale * (pred[i] - target[i]);
  return g;
}

inline double clamp_prob(double p) {
  return std::clamp(p, 1e-12, 1.0 - 1e-12);
}

// Binary cross entropy on a probability p in (0,1) against label z in {0,1}.
inline double bce_loss(double p, double z) {
  p = clamp_prob(p);
  return -(z * std::log(p) + (1.0 - z) * std::log(1.0 - p));
}

inline double bce_loss_grad(double p, double z) {
  p = clamp_prob(p);
  return (p - z) / (p * (1.0 - p));
}

// Pinball (check) loss for quantile level q on the error e = target - pred:
// rho_q(e) = max(q e, (q-1) e).  Minimizer is the q-th quantile.
inline double pinball_loss(double pred, double target, double q) {
  const double e = target - pred;
  return std::max(q * e, (q - 1.0) * e);
}

// d rho_q / d pred.  d rho / d e is q for e > 0, q-1 for e < 0, and q at the
// kink e = 0; the sign flips because e = target - pred.
inline double pinball_loss_grad(double pred, double target, double q) {
  const double e = target - pred;
  const double de = (e >= 0.0) ? q : (q - 1.0);
  return -de;
}

// Quantile non-crossing hinge: below the median the quantile prediction must
// not exceed the realized value, above the median it must not fall below it.
// Zero exactly when the constraint holds; q = 0.5 contributes nothing.
inline double crossing_penalty_term(double pred, double target, double q) {
  if (q < 0.5) return std::max(0.0, pred - target);
  if (q > 0.5) return std::max(0.0, target - pred);
  return 0.0;
}

inline double crossing_penalty_term_grad(double pred, double target, double q) {
  if (q < 0.5) return pred > target ? 1.0 : 0.0;
  if (q > 0.5) return target > pred ? -1.0 : 0.0;
  return 0.0;
}

}  // namespace genbayes::nn

#endif  // GENBAYES_LOSSES_HPP_
