#include "genbayes/optimizer.hpp"

#include <cmath>

namespace genbayes::nn {

void Optimizer::step(const std::vector<ParamBinding>& bindings) {
  if (m_.empty()) {
    m_.resize(bindings.size());
    v_.resize(bindings.size());
    if (cfg_.optimizer == OptKind::kAdam) {
      for (std::size_t i = 0; i < bindings.size(); ++i) {
        m_[i].assign(bindings[i].params.size(), 0.0);
        v_[i].assign(bindings[i].params.size(), 0.0);
      }
    }
  }
  if (bindings.size() != m_.size()) {
    throw DimensionError("Optimizer::step: binding count changed between steps");
  }

  for (const auto& b : bindings) {
    if (b.params.size() != b.grads.size()) {
      throw DimensionError("Optimizer::step: param/grad size mismatch in " + b.name);
    }
    for (double g : b.grads) {
      if (!std::isfinite(g)) {
        throw NumericError("non-finite gradient in " + b.name);
      }
    }
  }

  double clip_scale = 1.0;
  if (cfg_.gradient_clip) {
    double sq = 0.0;
    for (const auto& b : bindings)
      for (double g : b.grads) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > *cfg_.gradient_clip) clip_scale = *cfg_.gradient_clip / norm;
  }

  ++t_;
  const double lr = cfg_.learning_rate;
  if (cfg_.optimizer == OptKind::kSgd) {
    for (const auto& b : bindings) {
      for (std::size_t j = 0; j < b.params.size(); ++j) {
        b.params[j] -= lr * clip_scale * b.grads[j];
      }
    }
    return;
  }

  const double b1 = cfg_.adam.beta1;
  const double b2 = cfg_.adam.beta2;
  const double eps = cfg_.adam.eps;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < bindings.size(); ++i) {
    const auto& b = bindings[i];
    if (m_[i].size() != b.params.size()) {
      throw DimensionError("Optimizer::step: binding size changed in " + b.name);
    }
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < b.params.size(); ++j) {
      const double g = clip_scale * b.grads[j];
      m[j] = b1 * m[j] + (1.0 - b1) * g;
      v[j] = b2 * v[j] + (1.0 - b2) * g * g;
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      b.params[j] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

std::vector<ParamBinding> bind_mlp(Mlp& net, const Gradients& grads,
                                   const std::string& prefix) {
  if (grads.d_weights.size() != net.num_layers()) {
    throw DimensionError("bind_mlp: gradients do not match net layer count");
  }
  std::vector<ParamBinding> bindings;
  bindings.reserve(2 * net.num_layers());
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    auto& layer = net.layers()[l];
    bindings.push_back({prefix + ".layer" + std::to_string(l) + ".W",
                        std::span<double>(layer.weights.data()),
                        std::span<const double>(grads.d_weights[l].data())});
    bindings.push_back({prefix + ".layer" + std::to_string(l) + ".b",
                        std::span<double>(layer.bias),
                        std::span<const double>(grads.d_bias[l])});
  }
  return bindings;
}

}  // namespace genbayes::nn
