#ifndef GENBAYES_MLP_HPP_
#define GENBAYES_MLP_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "genbayes/activations.hpp"
#include "genbayes/matrix.hpp"
#include "genbayes/rng.hpp"

namespace genbayes::nn {

// One dense layer: post = h(W x + b), weights stored out x in.
struct DenseLayer {
  Matrix weights;            // out x in
  std::vector<double> bias;  // out
  Activation activation = Activation::kIdentity;

  DenseLayer() = default;
  DenseLayer(std::size_t in, std::size_t out, Activation act)
      : weights(out, in), bias(out, 0.0), activation(act) {}

  std::size_t in_dim() const { return weights.cols(); }
  std::size_t out_dim() const { return weights.rows(); }

  void validate() const {
    if (bias.size() != weights.rows()) {
      throw DimensionError("DenseLayer: bias length " + std::to_string(bias.size()) +
                           " != weight rows " + std::to_string(weights.rows()));
    }
  }
};

// Feedforward stack of dense layers.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) { validate(); }

  // Builds a net with the given layer sizes: dims = {in, h1, ..., out}.
  // Hidden layers use `hidden`, the last layer uses `output`.
  static Mlp make(const std::vector<std::size_t>& dims, Activation hidden,
                  Activation output, Rng& rng);

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  std::size_t num_layers() const { return layers_.size(); }
  std::size_t in_dim() const { return layers_.front().in_dim(); }
  std::size_t out_dim() const { return layers_.back().out_dim(); }
  std::size_t num_params() const;

  void validate() const;

 private:
  std::vector<DenseLayer> layers_;
};

// Everything backward needs from a forward pass: the input and per-layer
// pre/post activations.  post.back() is the network output.
struct ForwardTrace {
  std::vector<double> input;
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;

  const std::vector<double>& output() const { return post.back(); }
};

// Per-layer parameter gradients plus the gradient w.r.t. the input, so
// composite models can chain backward passes across sub-networks.
struct Gradients {
  std::vector<Matrix> d_weights;
  std::vector<std::vector<double>> d_bias;
  std::vector<double> d_input;

  static Gradients zeros_like(const Mlp& net);
  void set_zero();
  void scale(double factor);
};

// Pure forward pass; does not mutate the net.
ForwardTrace forward(const Mlp& net, std::span<const double> input);

// Reallocation-free variant for hot loops.
void forward_into(const Mlp& net, std::span<const double> input, ForwardTrace& trace);

// Reverse pass.  output_grad is dLoss/dOutput; result carries gradients
// shaped exactly like the parameters plus dLoss/dInput.
Gradients backward(const Mlp& net, const ForwardTrace& trace,
                   std::span<const double> output_grad);

// Accumulating variant: adds this example's gradients into `acc`
// (d_input is overwritten, not accumulated).
void backward_accumulate(const Mlp& net, const ForwardTrace& trace,
                         std::span<const double> output_grad, Gradients& acc);

// Glorot-style uniform init on U(-sqrt(6/(fan_in+fan_out)), +...), biases 0.
void glorot_init(Mlp& net, Rng& rng);

}  // namespace genbayes::nn

#endif  // GENBAYES_MLP_HPP_
