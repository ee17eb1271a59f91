#ifndef GENBAYES_OPTIMIZER_HPP_
#define GENBAYES_OPTIMIZER_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "genbayes/errors.hpp"
#include "genbayes/mlp.hpp"

namespace genbayes::nn {

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

enum class OptKind { kSgd, kAdam };

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 128;
  std::size_t epochs = 100;
  OptKind optimizer = OptKind::kAdam;
  AdamParams adam;
  std::uint64_t seed = 0;
  std::optional<double> gradient_clip;  // global-norm clip, off by default

  void validate() const {
    if (!(learning_rate > 0.0)) throw ValueError("learning_rate must be > 0");
    if (batch_size < 1) throw ValueError("batch_size must be >= 1");
    if (epochs < 1) throw ValueError("epochs must be >= 1");
    if (gradient_clip && !(*gradient_clip > 0.0))
      throw ValueError("gradient_clip must be > 0 when set");
  }
};

// One named parameter array paired with its gradient for a step.
struct ParamBinding {
  std::string name;
  std::span<double> params;
  std::span<const double> grads;
};

// SGD / Adam over a fixed set of parameter arrays.  The binding list must
// keep the same order and sizes on every step; the first step sizes the
// moment buffers.  Updates are applied in binding order, so trajectories
// are bit-reproducible.
class Optimizer {
 public:
  explicit Optimizer(TrainConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

  void step(const std::vector<ParamBinding>& bindings);

  const TrainConfig& config() const { return cfg_; }
  std::int64_t steps_taken() const { return t_; }

  // Serializable state (moment buffers + step count).
  struct State {
    std::int64_t t = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
  };
  State save_state() const { return State{t_, m_, v_}; }
  void restore_state(const State& st) {
    t_ = st.t;
    m_ = st.m;
    v_ = st.v;
  }

 private:
  TrainConfig cfg_;
  std::int64_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

// Mlp convenience wrapper: binds every layer's weights and biases, in layer
// order, against an Mlp-shaped Gradients value.
std::vector<ParamBinding> bind_mlp(Mlp& net, const Gradients& grads,
                                   const std::string& prefix);

struct MlpOptimizer {
  explicit MlpOptimizer(const TrainConfig& cfg) : opt(cfg) {}
  void step(Mlp& net, const Gradients& grads, const std::string& prefix = "mlp") {
    opt.step(bind_mlp(net, grads, prefix));
  }
  Optimizer opt;
};

}  // namespace genbayes::nn

#endif  // GENBAYES_OPTIMIZER_HPP_
