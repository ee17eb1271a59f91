#ifndef GENBAYES_METRICS_HPP_
#define GENBAYES_METRICS_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "genbayes/causal.hpp"
#include "genbayes/dgp.hpp"

namespace genbayes::metrics {

struct MetricsReport {
  double ate_true = 0.0;
  double ate_est = 0.0;
  double ate_sq_err = 0.0;
  double cate_rmse = 0.0;
  double coverage = 0.0;
  double avg_interval_length = 0.0;
  double crossing_rate = 0.0;
  double pit_ks = 0.0;
  double baseline_cate_rmse = 0.0;
  std::size_t n = 0;
  std::size_t M = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EvaluateOptions {
  std::size_t lorenz_grid = 99;
  std::size_t crossing_grid = 9;  // q = 0.1 .. 0.9
};

// Per-unit byproducts of an evaluation, for the predictions artifact.
struct UnitPrediction {
  double y_hat_mean = 0.0;
  double y_hat_q50 = 0.0;
  double pi_hat = 0.0;
  double cate_mean = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// Model access used by the evaluator; batched per unit so oracles and
// test doubles can stand in for a trained net.
struct ModelHooks {
  // effect quantile readout Delta(x_i, u) for each u
  std::function<void(std::size_t, std::span<const double>, std::span<double>)>
      effect_quantiles;
  // outcome quantile readout y_hat2(x_i, q) at the unit's observed arm
  std::function<void(std::size_t, std::span<const double>, std::span<double>)>
      outcome_quantiles;
  // scalar propensity and the two q = 0.5 heads
  std::function<UnitPrediction(std::size_t)> point_summary;
};

ModelHooks hooks_for_net(const causal::CausalQuantileNet& net,
                         const dgp::CausalDataset& ds);

// Full evaluation of a model against ground truth.  Deterministic in
// (ds, hooks, M, level, seed).
MetricsReport evaluate_hooks(const dgp::CausalDataset& ds, const ModelHooks& hooks,
                             std::size_t M, double level, std::uint64_t seed,
                             const EvaluateOptions& opts = {},
                             std::vector<UnitPrediction>* per_unit = nullptr);

MetricsReport evaluate(const dgp::CausalDataset& ds, const causal::CausalQuantileNet& net,
                       std::size_t M, double level, std::uint64_t seed,
                       const EvaluateOptions& opts = {},
                       std::vector<UnitPrediction>* per_unit = nullptr);

struct LorenzCheck {
  double quadrature_mean = 0.0;
  double sample_mean = 0.0;
  double gap = 0.0;
};

// Midpoint-grid average of the empirical quantile function against the
// arithmetic mean; with grid == sample size and nearest-rank quantiles the
// gap is exactly zero.
LorenzCheck lorenz_check(std::span<const double> sample, std::size_t grid_size);

// OLS of y on [1, x, z, x*z]; per-unit CATE readout from the interaction
// coefficients.  The internal benchmarking baseline.
std::vector<double> baseline_linear_cate(const dgp::CausalDataset& ds);

// PIT of each realized value among its model draws (midrank for ties),
// then the KS distance of the PITs from Uniform(0,1).
double pit_calibration(const std::vector<std::vector<double>>& draws_per_unit,
                       std::span<const double> realized);

// Flat key = value report, one metric per line, 17 significant digits.
void write_report_file(const MetricsReport& report, const std::string& path);

std::vector<std::string> report_csv_header();
std::vector<std::string> report_csv_row(const MetricsReport& report);

}  // namespace genbayes::metrics

#endif  // GENBAYES_METRICS_HPP_
