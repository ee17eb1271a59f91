#ifndef GENBAYES_ENGINE_HPP_
#define GENBAYES_ENGINE_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "genbayes/checkpoint.hpp"
#include "genbayes/dgp.hpp"
#include "genbayes/matrix.hpp"
#include "genbayes/mlp.hpp"
#include "genbayes/optimizer.hpp"
#include "genbayes/rng.hpp"

namespace genbayes::engine {

enum class TauDist { kUniform, kGaussian };
enum class TauEmbedding { kRaw, kCosine };
enum class HeadLoss { kPinball, kL2 };

std::string tau_dist_name(TauDist d);
TauDist tau_dist_from_name(const std::string& name);

// Simulation triples {theta, y, tau}: one row per draw across the three blocks.
struct SimTable {
  Matrix theta;  // N x k
  Matrix y;      // N x n
  Matrix tau;    // N x d
  TauDist tau_dist = TauDist::kUniform;

  std::size_t rows() const { return theta.rows(); }
  std::size_t theta_dim() const { return theta.cols(); }
  std::size_t y_dim() const { return y.cols(); }
  std::size_t tau_dim() const { return tau.cols(); }

  void save_csv(const std::string& path) const;
  static SimTable load_csv(const std::string& path);
};

// A prior + forward-model sampler.  simulate() fills one (theta, y) pair;
// deterministic forward maps y = s(theta) simply ignore the rng for y.
class Simulator {
 public:
  virtual ~Simulator() = default;
  virtual std::size_t theta_dim() const = 0;
  virtual std::size_t y_dim() const = 0;
  virtual void simulate(Rng& rng, std::span<double> theta, std::span<double> y) const = 0;
};

// Normal-normal conjugate model: theta ~ N(prior_mean, prior_sd^2),
// y_j | theta ~ N(theta, like_sd^2).  The validation workhorse: its
// posterior is available in closed form.
class ConjugateSimulator : public Simulator {
 public:
  ConjugateSimulator(double prior_mean, double prior_sd, double like_sd,
                     std::size_t obs_per_draw = 1);
  std::size_t theta_dim() const override { return 1; }
  std::size_t y_dim() const override { return obs_per_draw_; }
  void simulate(Rng& rng, std::span<double> theta, std::span<double> y) const override;

  double prior_mean() const { return prior_mean_; }
  double prior_sd() const { return prior_sd_; }
  double like_sd() const { return like_sd_; }

  // Analytic posterior for observed y (all obs_per_draw values).
  double posterior_mean(std::span<const double> y_obs) const;
  double posterior_variance() const;

 private:
  double prior_mean_, prior_sd_, like_sd_;
  std::size_t obs_per_draw_;
};

// Arbitrary simulator from callables; used by tests for identity forward
// maps and linear-Gaussian designs.
class CallableSimulator : public Simulator {
 public:
  using Fn = std::function<void(Rng&, std::span<double>, std::span<double>)>;
  CallableSimulator(std::size_t theta_dim, std::size_t y_dim, Fn fn)
      : theta_dim_(theta_dim), y_dim_(y_dim), fn_(std::move(fn)) {}
  std::size_t theta_dim() const override { return theta_dim_; }
  std::size_t y_dim() const override { return y_dim_; }
  void simulate(Rng& rng, std::span<double> theta, std::span<double> y) const override {
    fn_(rng, theta, y);
  }

 private:
  std::size_t theta_dim_, y_dim_;
  Fn fn_;
};

// Draws N iid triples.  Row i uses the derived stream (seed, i), so the
// table is reproducible and chunk-parallelizable.  Simulator exceptions
// are rethrown with the failing row index.
SimTable build_sim_table(const Simulator& sim, std::size_t N, TauDist tau_dist,
                         std::size_t tau_dim, std::uint64_t seed);

struct EngineArch {
  std::vector<std::size_t> summary_hidden = {64, 64};
  nn::Activation summary_activation = nn::Activation::kTanh;
  std::vector<std::size_t> head_hidden = {64, 64, 64};
  nn::Activation head_activation = nn::Activation::kRelu;
  TauEmbedding tau_embedding = TauEmbedding::kCosine;
  std::size_t cosine_dim = 32;
  HeadLoss head_loss = HeadLoss::kPinball;
  bool resample_tau = true;  // fresh taus each epoch; false replays the table's

  std::size_t embedded_tau_dim(std::size_t tau_dim) const {
    return tau_embedding == TauEmbedding::kCosine ? tau_dim * cosine_dim : tau_dim;
  }
};

// The trained inverse posterior map theta =D= head(summary(y), embed(tau)).
struct InverseMap {
  nn::Mlp summary;
  nn::Mlp head;
  EngineArch arch;
  TauDist tau_dist = TauDist::kUniform;
  std::size_t theta_dim = 0;
  std::size_t y_dim = 0;
  std::size_t tau_dim = 0;
  std::vector<double> loss_trace;  // per-epoch mean training loss

  std::vector<double> embed_tau(std::span<const double> tau) const;
  // One evaluation of the map at a concrete (y, tau).
  std::vector<double> predict(std::span<const double> y_obs,
                              std::span<const double> tau) const;
};

// Side-channel training state: epoch_loss is appended per epoch so the
// trace survives a divergence throw; the optimizer and tau-stream states
// are filled on success for checkpointing.
struct EngineTrainDiag {
  std::vector<double> epoch_loss;
  nn::Optimizer::State opt_state;
  Rng::State tau_rng_state;
};

// Fits summary and head jointly by minibatch gradient descent on the
// per-row regression objective (pinball in quantile-head mode, squared
// error in l2 mode).  Throws NumericError naming the last finite epoch if
// the loss diverges.
InverseMap train_inverse_map(const SimTable& table, const EngineArch& arch,
                             const nn::TrainConfig& cfg,
                             EngineTrainDiag* diag = nullptr);

// M posterior draws for y_obs: fresh baseline taus pushed through the map.
Matrix posterior_sample(const InverseMap& map, std::span<const double> y_obs,
                        std::size_t M, std::uint64_t seed);

// Plain forward pass through a summary network.
std::vector<double> summary_forward(const nn::Mlp& net, std::span<const double> y);

// The cited summary stack: hidden tanh (or relu) layers, affine output of
// width theta_dim.
nn::Mlp make_summary_net(std::size_t y_dim, std::size_t theta_dim,
                         const std::vector<std::size_t>& hidden,
                         nn::Activation activation, Rng& rng);

// Least-squares fit of the mixture-of-Gaussians generative form: theta
// regressed jointly on [y-block, J fresh standard normals] plus an
// intercept.  tau_coef_se carries the OLS standard errors of the noise
// coefficients.
struct LinearGenerative {
  Matrix w_coefs;       // k x y_dim
  Matrix tau_coefs;     // k x J
  Matrix tau_coef_se;   // k x J
  std::vector<double> intercept;  // k
  std::size_t noise_dim = 0;
};

LinearGenerative estimate_linear_generative(const SimTable& table, std::size_t J,
                                            std::uint64_t seed);

void save_inverse_map(Checkpoint& ckpt, const InverseMap& map);
InverseMap load_inverse_map(const Checkpoint& ckpt);

}  // namespace genbayes::engine

#endif  // GENBAYES_ENGINE_HPP_
