#ifndef GENBAYES_DGP_HPP_
#define GENBAYES_DGP_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "genbayes/matrix.hpp"
#include "genbayes/rng.hpp"

namespace genbayes::dgp {

// Synthetic causal benchmark sample.  Ground-truth columns (mu_true,
// tau_true, tau_raw, pi_true) are populated by the generator and stripped
// by the observational view.
struct CausalDataset {
  std::size_t n = 0;
  std::size_t p = 0;
  Matrix x;                      // n x p
  std::vector<int> z;            // treatment, {0,1}
  std::vector<double> y;         // outcome
  std::vector<double> mu_true;   // baseline effect
  std::vector<double> tau_true;  // standardized treatment effect
  std::vector<double> tau_raw;   // raw-scale treatment effect
  std::vector<double> pi_true;   // propensity, strictly in (0,1)
  double tau_mean = 0.0;         // affine parameters mapping raw -> standardized
  double tau_sd = 1.0;
  double sigma = 1.0;            // outcome noise sd
  std::uint64_t seed = 0;

  bool has_ground_truth() const { return !tau_true.empty(); }

  // Copy with ground-truth columns removed.
  CausalDataset observational_view() const;
};

struct GenCausalOptions {
  std::size_t p = 3;         // covariate dimension; extra columns are pure noise
  bool use_raw_tau = false;  // generate y with raw-scale tau instead of standardized
};

// The generating formulas, exposed so tests can evaluate them pointwise.
double causal_mu(double x1, double x2);
double causal_tau_raw(double x2, double x3);

// The benchmark generator:
//   x_ij ~ N(0,1)
//   mu_i = -6 + 1[x_i1 > x_i2] + 6|x_i2 - 1|
//   pi_i = sigmoid(mu_i)
//   z_i ~ Bernoulli(pi_i)            (inverse-CDF on the shared stream)
//   tau_raw_i = 1 - 2 x_i2 x_i3, standardized to mean 0 / variance 1
//   y_i ~ N(mu_i + tau_i z_i, sigma^2)
// Draw order is fixed (all x, then all z, then all y-noise) so a seed pins
// the dataset exactly.
CausalDataset gen_causal(std::size_t n, double sigma, std::uint64_t seed,
                         const GenCausalOptions& opts = {});

struct StandardizedTau {
  std::vector<double> tau_std;
  double mean = 0.0;
  double sd = 1.0;
};

// Centers and scales with the population-style divisor n.  Errors on
// fewer than two values or zero variance.
StandardizedTau standardize_tau(std::span<const double> tau_raw);

// Conjugate normal-normal simulation: theta_i ~ N(prior_mean, prior_sd^2),
// y_ij | theta_i ~ N(theta_i, like_sd^2), j < obs_per_draw.
struct ConjugateDataset {
  std::vector<double> theta;  // N
  Matrix y;                   // N x obs_per_draw
  double prior_mean = 0.0;
  double prior_sd = 1.0;
  double like_sd = 1.0;
  std::uint64_t seed = 0;
};

ConjugateDataset gen_conjugate(std::size_t N, double prior_mean, double prior_sd,
                               double like_sd, std::uint64_t seed,
                               std::size_t obs_per_draw = 1);

// Sample-average treatment effect on the standardized scale; ~0 by
// construction after standardization.
double true_ate(const CausalDataset& ds);

// CSV schema: unit_id,x1..xp,z,y[,mu_true,tau_true,pi_true].
void write_dataset_csv(const CausalDataset& ds, const std::string& path,
                       bool include_ground_truth);
CausalDataset read_dataset_csv(const std::string& path);

}  // namespace genbayes::dgp

#endif  // GENBAYES_DGP_HPP_
