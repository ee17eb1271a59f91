#include "genbayes/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace genbayes::nn {

Mlp Mlp::make(const std::vector<std::size_t>& dims, Activation hidden,
              Activation output, Rng& rng) {
  if (dims.size() < 2) throw ValueError("Mlp::make needs at least in and out dims");
  std::vector<DenseLayer> layers;
  layers.reserve(dims.size() - 1);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const bool last = (i + 2 == dims.size());
    layers.emplace_back(dims[i], dims[i + 1], last ? output : hidden);
  }
  Mlp net(std::move(layers));
  glorot_init(net, rng);
  return net;
}

std::size_t Mlp::num_params() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weights.size() + layer.bias.size();
  return n;
}

void Mlp::validate() const {
  if (layers_.empty()) throw ValueError("Mlp has no layers");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i].validate();
    if (i > 0 && layers_[i].in_dim() != layers_[i - 1].out_dim()) {
      throw DimensionError("Mlp: layer " + std::to_string(i) + " in-dim " +
                           std::to_string(layers_[i].in_dim()) + " != layer " +
                           std::to_string(i - 1) + " out-dim " +
                           std::to_string(layers_[i - 1].out_dim()));
    }
  }
}

Gradients Gradients::zeros_like(const Mlp& net) {
  Gradients g;
  g.d_weights.reserve(net.num_layers());
  g.d_bias.reserve(net.num_layers());
  for (const auto& layer : net.layers()) {
    g.d_weights.emplace_back(layer.out_dim(), layer.in_dim());
    g.d_bias.emplace_back(layer.out_dim(), 0.0);
  }
  g.d_input.assign(net.in_dim(), 0.0);
  return g;
}

void Gradients::set_zero() {
  for (auto& w : d_weights) std::fill(w.data().begin(), w.data().end(), 0.0);
  for (auto& b : d_bias) std::fill(b.begin(), b.end(), 0.0);
  std::fill(d_input.begin(), d_input.end(), 0.0);
}

void Gradients::scale(double factor) {
  for (auto& w : d_weights)
    for (auto& v : w.data()) v *= factor;
  for (auto& b : d_bias)
    for (auto& v : b) v *= factor;
  for (auto& v : d_input) v *= factor;
}

void forward_into(const Mlp& net, std::span<const double> input, ForwardTrace& trace) {
  if (input.size() != net.in_dim()) {
    throw DimensionError("forward: input length " + std::to_string(input.size()) +
                         " != net in-dim " + std::to_string(net.in_dim()));
  }
  const std::size_t L = net.num_layers();
  trace.input.assign(input.begin(), input.end());
  trace.pre.resize(L);
  trace.post.resize(L);

  const std::vector<double>* cur = &trace.input;
  for (std::size_t l = 0; l < L; ++l) {
    const DenseLayer& layer = net.layers()[l];
    const std::size_t out = layer.out_dim();
    const std::size_t in = layer.in_dim();
    auto& pre = trace.pre[l];
    auto& post = trace.post[l];
    pre.resize(out);
    post.resize(out);
    const double* x = cur->data();
    for (std::size_t i = 0; i < out; ++i) {
      const double* w = layer.weights.data().data() + i * in;
      double acc = layer.bias[i];
      for (std::size_t j = 0; j < in; ++j) acc += w[j] * x[j];
      pre[i] = acc;
      post[i] = activate(layer.activation, acc);
    }
    cur = &post;
  }
}

ForwardTrace forward(const Mlp& net, std::span<const double> input) {
  ForwardTrace trace;
  forward_into(net, input, trace);
  return trace;
}

void backward_accumulate(const Mlp& net, const ForwardTrace& trace,
                         std::span<const double> output_grad, Gradients& acc) {
  const std::size_t L = net.num_layers();
  if (trace.pre.size() != L || trace.post.size() != L) {
    throw DimensionError("backward: trace does not match net (layer count)");
  }
  if (output_grad.size() != net.out_dim()) {
    throw DimensionError("backward: output-grad length " +
                         std::to_string(output_grad.size()) + " != out-dim " +
                         std::to_string(net.out_dim()));
  }
  if (trace.input.size() != net.in_dim()) {
    throw DimensionError("backward: trace input does not match net in-dim");
  }

  // delta = dLoss/d(pre-activation) of the current layer, walked backwards.
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  std::vector<double> next_delta;
  for (std::size_t li = L; li-- > 0;) {
    const DenseLayer& layer = net.layers()[li];
    const std::size_t out = layer.out_dim();
    const std::size_t in = layer.in_dim();
    if (trace.pre[li].size() != out) {
      throw DimensionError("backward: trace layer " + std::to_string(li) +
                           " width does not match net");
    }
    for (std::size_t i = 0; i < out; ++i) {
      delta[i] *= activate_grad(layer.activation, trace.pre[li][i], trace.post[li][i]);
    }
    const std::vector<double>& below =
        (li == 0) ? trace.input : trace.post[li - 1];
    Matrix& dW = acc.d_weights[li];
    auto& db = acc.d_bias[li];
    for (std::size_t i = 0; i < out; ++i) {
      const double d = delta[i];
      double* dw = dW.data().data() + i * in;
      for (std::size_t j = 0; j < in; ++j) dw[j] += d * below[j];
      db[i] += d;
    }
    next_delta.assign(in, 0.0);
    for (std::size_t i = 0; i < out; ++i) {
      const double d = delta[i];
      const double* w = layer.weights.data().data() + i * in;
      for (std::size_t j = 0; j < in; ++j) next_delta[j] += d * w[j];
    }
    delta.swap(next_delta);
  }
  acc.d_input = delta;
}

Gradients backward(const Mlp& net, const ForwardTrace& trace,
                   std::span<const double> output_grad) {
  Gradients g = Gradients::zeros_like(net);
  backward_accumulate(net, trace, output_grad, g);
  return g;
}

void glorot_init(Mlp& net, Rng& rng) {
  for (auto& layer : net.layers()) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layer.in_dim() + layer.out_dim()));
    for (auto& w : layer.weights.data()) w = rng.uniform(-limit, limit);
    for (auto& b : layer.bias) b = 0.0;
  }
}

}  // namespace genbayes::nn
