#ifndef GENBAYES_ACTIVATIONS_HPP_
#define GENBAYES_ACTIVATIONS_HPP_

#include <cmath>
#include <string>

#include "genbayes/errors.hpp"

namespace genbayes::nn {

enum class Activation { kIdentity, kRelu, kTanh, kSigmoid };

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double activate(Activation a, double x) {
  switch (a) {
    case Activation::kIdentity: return x;
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
    case Activation::kTanh: return std::tanh(x);
    case Activation::kSigmoid: return sigmoid(x);
  }
  throw ValueError("unknown activation");
}

// Derivative in terms of (pre-activation, post-activation).  relu'(0) is
// fixed at 0 so subgradient choice is deterministic.
inline double activate_grad(Activation a, double pre, double post) {
  switch (a) {
    case Activation::kIdentity: return 1.0;
    case Activation::kRelu: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh: return 1.0 - post * post;
    case Activation::kSigmoid: return post * (1.0 - post);
  }
  throw ValueError("unknown activation");
}

inline std::string activation_name(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    case Activation::kSigmoid: return "sigmoid";
  }
  throw ValueError("unknown activation");
}

inline Activation activation_from_name(const std::string& name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw ValueError("unknown activation name: " + name);
}

}  // namespace genbayes::nn

#endif  // GENBAYES_ACTIVATIONS_HPP_
