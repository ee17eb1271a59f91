#ifndef GENBAYES_CAUSAL_HPP_
#define GENBAYES_CAUSAL_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "genbayes/checkpoint.hpp"
#include "genbayes/dgp.hpp"
#include "genbayes/embedding.hpp"
#include "genbayes/mlp.hpp"
#include "genbayes/optimizer.hpp"
#include "genbayes/rng.hpp"

namespace genbayes::causal {

// Architecture of the joint propensity / outcome / effect network:
//
//   s   = h(W1 * cos_embed(q))            quantile embedding block
//   pt  = h(W2 * x)                        propensity trunk (width 8)
//   ph  = h(W3 * pt)                       propensity block (width 32)
//   gate = sigmoid(ph)                     32-wide treatment gate
//   zhat = mean(gate)                      scalar propensity readout
//   mu  = s o h(W4 * [x, pt])              baseline branch
//   tau = s o h(W5 * x)                    effect branch
//   yhat = W6 * (mu + tau o gate)          2 outputs: mean, quantile
//
// o is the element-wise product.  scalar_q_gate replaces s by the scalar q
// in the two products (ablation flag; W1 is then unused).
//
// The treatment likelihood drives every gate component toward the observed
// z (component-mean Bernoulli log-loss).  A scalar-only readout leaves the
// per-component polarity free, and components that never activate for
// treated units during training drift arbitrarily; the forced-gate
// counterfactual readout then reads garbage.  Component-wise training pins
// the gate's on/off states to the same all-ones/all-zeros configurations
// the counterfactual switch uses.
struct CausalArch {
  std::size_t x_dim = 3;
  std::size_t embed_dim = 32;
  std::size_t prop_hidden = 8;
  std::size_t block_width = 32;
  nn::Activation hidden_activation = nn::Activation::kRelu;
  bool scalar_q_gate = false;

  void validate() const;
};

// How the 32-wide gate is set during a forward pass.  Training uses the
// learned gate; counterfactual readouts force it to exact 1 or 0.
enum class GateMode { kLearned, kForceTreated, kForceControl };

struct CausalQuantileNet {
  CausalArch arch;
  nn::DenseLayer embed_block;           // W1
  nn::DenseLayer prop1;                 // W2
  nn::DenseLayer prop2;                 // W3
  nn::DenseLayer mu_block;              // W4
  nn::DenseLayer tau_block;             // W5
  nn::DenseLayer out_head;              // W6, affine
  bool trained = false;

  static CausalQuantileNet make(const CausalArch& arch, Rng& rng);
  std::size_t num_params() const;
  void validate() const;
};

// Full forward record; holds every intermediate the backward pass needs.
struct CausalTrace {
  std::vector<double> x;
  double q = 0.0;
  GateMode gate_mode = GateMode::kLearned;
  std::vector<double> s0;                 // cosine embedding of q
  std::vector<double> s_pre, s;
  std::vector<double> pt_pre, pt;
  std::vector<double> ph_pre, ph;
  std::vector<double> sigma_ph;  // sigmoid(ph), independent of gate forcing
  std::vector<double> gate;      // sigma_ph, or the forced 0/1 pattern
  double zs = 0.5;               // mean of sigma_ph
  std::vector<double> m_in;
  std::vector<double> mf_pre, mf;
  std::vector<double> mu;
  std::vector<double> tf_pre, tf;
  std::vector<double> tau;
  std::vector<double> h;
  std::array<double, 2> yhat{0.0, 0.0};
};

void forward_causal_into(const CausalQuantileNet& net, std::span<const double> x,
                         double q, GateMode mode, CausalTrace& trace);

// The spec'd readout: (mean response, quantile response, scalar propensity,
// mu branch, tau branch).
struct CausalOutput {
  double y_mean = 0.0;
  double y_quantile = 0.0;
  double z_prob = 0.5;
  std::vector<double> mu_vec;
  std::vector<double> tau_vec;
};

CausalOutput forward_causal(const CausalQuantileNet& net, std::span<const double> x,
                            double q, GateMode mode = GateMode::kLearned);

// Parameter-shaped gradients for the whole composite.
struct CausalGradients {
  Matrix d_embed_w;
  std::vector<double> d_embed_b;
  Matrix d_prop1_w;
  std::vector<double> d_prop1_b;
  Matrix d_prop2_w;
  std::vector<double> d_prop2_b;
  Matrix d_mu_w;
  std::vector<double> d_mu_b;
  Matrix d_tau_w;
  std::vector<double> d_tau_b;
  Matrix d_out_w;
  std::vector<double> d_out_b;

  static CausalGradients zeros_like(const CausalQuantileNet& net);
  void set_zero();
  void scale(double f);
};

// Backprop one unit: d_yhat is dLoss/d(yhat1, yhat2); d_lz_scale premultiplies
// the component-mean Bernoulli term, so dLoss/d(ph_c) picks up
// d_lz_scale * (sigma(ph_c) - z) / block_width.  Accumulates into `acc`.
void backward_causal_accumulate(const CausalQuantileNet& net, const CausalTrace& trace,
                                const std::array<double, 2>& d_yhat, double d_lz_scale,
                                double z_label, CausalGradients& acc);

struct LossWeights {
  double w_z = 1.0;
  double w_q = 1.0;
  double w_mse = 1.0;
  double w_cross = 1.0;

  void validate() const;
};

struct LossComponents {
  double total = 0.0;
  double l_z = 0.0;      // negative Bernoulli log-likelihood (minimized)
  double l_q = 0.0;      // pinball on the quantile head
  double l_mse = 0.0;    // squared error on the mean head
  double l_cross = 0.0;  // non-crossing hinge
  std::size_t clamp_count = 0;  // times zhat had to be clamped away from {0,1}
};

// Evaluates the joint objective on a dataset with one quantile draw per
// unit.  Pure; the training loop recomputes the same quantities with
// gradients.
LossComponents joint_loss(const CausalQuantileNet& net, const dgp::CausalDataset& ds,
                          std::span<const double> q_draws, const LossWeights& weights);

// Mean non-crossing hinge over units:
//   q < 0.5: relu(yq - y),  q > 0.5: relu(y - yq),  q = 0.5: 0.
double crossing_penalty(std::span<const double> y, std::span<const double> y_quantile,
                        std::span<const double> q);

struct TrainResultTrace {
  std::vector<LossComponents> epochs;
  nn::Optimizer::State opt_state;   // for checkpointing resumable state
  Rng::State q_rng_state;
};

// Jointly trains all blocks on the observational view (x, z, y) with fresh
// uniform q draws per unit per epoch.  Deterministic under cfg.seed.
CausalQuantileNet train_causal(const dgp::CausalDataset& ds, const CausalArch& arch,
                               const nn::TrainConfig& cfg, const LossWeights& weights,
                               TrainResultTrace* trace = nullptr);

struct CatePosterior {
  std::int64_t unit_id = -1;
  std::vector<double> draws;
};

// Effect quantile readout Delta(x, u): the quantile head with the gate
// forced to 1 minus forced to 0.  Algebraically this is the quantile row
// of W6 applied to the tau branch; mu and the bias cancel.
double cate_effect_at(const CausalQuantileNet& net, std::span<const double> x, double u);

// Per-unit treatment-effect draws: for q_j ~ U(0,1), the quantile-head
// difference between the gate forced to 1 and forced to 0.
CatePosterior cate_posterior(const CausalQuantileNet& net, std::span<const double> x,
                             std::size_t M, std::uint64_t seed,
                             std::int64_t unit_id = -1);

// Lorenz-identity ATE: per-unit average of the effect readout over the
// midpoint quantile grid u_g = (g - 0.5)/G, then averaged over the sample.
double ate_lorenz(const CausalQuantileNet& net, const dgp::CausalDataset& ds,
                  std::size_t grid_size = 99);

// Empirical central credible interval, nearest-rank convention.
std::pair<double, double> credible_interval(const CatePosterior& posterior, double level);

void save_causal_net(Checkpoint& ckpt, const CausalQuantileNet& net);
CausalQuantileNet load_causal_net(const Checkpoint& ckpt);

}  // namespace genbayes::causal

#endif  // GENBAYES_CAUSAL_HPP_
