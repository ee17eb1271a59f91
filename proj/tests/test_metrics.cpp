#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "genbayes/config.hpp"
#include "genbayes/csv.hpp"
#include "genbayes/metrics.hpp"
#include "genbayes/stats.hpp"

using namespace genbayes;
using namespace genbayes::metrics;

TEST_CASE("lorenz_check: constant sample has zero gap") {
  const std::vector<double> sample(10, 4.2);
  const LorenzCheck lc = lorenz_check(sample, 7);
  CHECK(lc.quadrature_mean == doctest::Approx(4.2));
  CHECK(lc.sample_mean == doctest::Approx(4.2));
  CHECK(lc.gap == doctest::Approx(0.0));
}

TEST_CASE("lorenz_check: two-point sample on a two-point grid") {
  const std::vector<double> sample{0.0, 1.0};
  const LorenzCheck lc = lorenz_check(sample, 2);
  // u = 0.25 -> first order statistic 0; u = 0.75 -> second, 1
  CHECK(lc.quadrature_mean == doctest::Approx(0.5));
  CHECK(lc.gap == doctest::Approx(0.0));
}

TEST_CASE("lorenz_check: grid equal to sample size is exact for any sample") {
  Rng rng(3);
  for (std::size_t n : {std::size_t{2}, std::size_t{17}, std::size_t{100}}) {
    std::vector<double> sample(n);
    for (auto& v : sample) v = rng.gaussian() * 3.0 + 1.0;
    const LorenzCheck lc = lorenz_check(sample, n);
    CHECK(std::abs(lc.gap) < 1e-12);
  }
}

TEST_CASE("lorenz_check: gap shrinks with scale") {
  Rng rng(5);
  std::vector<double> small(1000), big(100000);
  for (auto& v : small) v = rng.gaussian();
  for (auto& v : big) v = rng.gaussian();
  CHECK(std::abs(lorenz_check(small, 33).gap) < 0.05);
  CHECK(std::abs(lorenz_check(big, 99).gap) < 0.01);
}

TEST_CASE("baseline_linear_cate: exact recovery of a linear effect at zero noise") {
  // y = 1 + 2 x1 - x2 + (0.5 + 1.5 x3) z, no noise
  dgp::CausalDataset ds = dgp::gen_causal(200, 1.0, 11);
  for (std::size_t i = 0; i < ds.n; ++i) {
    const double cate = 0.5 + 1.5 * ds.x(i, 2);
    ds.y[i] = 1.0 + 2.0 * ds.x(i, 0) - ds.x(i, 1) + cate * ds.z[i];
  }
  const std::vector<double> cate = baseline_linear_cate(ds);
  for (std::size_t i = 0; i < ds.n; ++i) {
    CHECK(cate[i] == doctest::Approx(0.5 + 1.5 * ds.x(i, 2)).epsilon(1e-6));
  }
}

TEST_CASE("baseline_linear_cate: constant treatment column is singular") {
  dgp::CausalDataset ds = dgp::gen_causal(50, 1.0, 13);
  for (auto& z : ds.z) z = 1;
  CHECK_THROWS_AS((void)baseline_linear_cate(ds), ValueError);
}

TEST_CASE("pit_calibration: draws from the exact conditional law are uniform") {
  Rng rng(21);
  const std::size_t units = 1000, M = 200;
  std::vector<std::vector<double>> draws(units);
  std::vector<double> realized(units);
  for (std::size_t i = 0; i < units; ++i) {
    const double mean = rng.gaussian() * 2.0;
    draws[i].resize(M);
    for (auto& d : draws[i]) d = rng.gaussian(mean, 1.0);
    realized[i] = rng.gaussian(mean, 1.0);
  }
  CHECK(pit_calibration(draws, realized) < 0.05);
}

TEST_CASE("pit_calibration: total miscalibration gives KS near one") {
  const std::size_t units = 50, M = 120;
  std::vector<std::vector<double>> draws(units, std::vector<double>(M));
  std::vector<double> realized(units, -100.0);
  for (auto& row : draws) {
    for (std::size_t j = 0; j < M; ++j) row[j] = static_cast<double>(j);
  }
  CHECK(pit_calibration(draws, realized) == doctest::Approx(1.0));
}

TEST_CASE("pit_calibration: input validation") {
  std::vector<std::vector<double>> one_unit{std::vector<double>(200, 0.0)};
  std::vector<double> one_real{0.5};
  CHECK_THROWS_AS((void)pit_calibration(one_unit, one_real), ValueError);

  std::vector<std::vector<double>> short_draws{std::vector<double>(50, 0.0),
                                               std::vector<double>(50, 0.0)};
  std::vector<double> reals{0.5, 0.5};
  CHECK_THROWS_AS((void)pit_calibration(short_draws, reals), ValueError);
}

TEST_CASE("pit_calibration: ties are midranked") {
  // realized exactly equals every draw: PIT = 0.5 for each unit
  std::vector<std::vector<double>> draws(3, std::vector<double>(100, 1.0));
  std::vector<double> realized(3, 1.0);
  // all PITs at 0.5: KS against uniform is 0.5
  CHECK(pit_calibration(draws, realized) == doctest::Approx(0.5));
}

namespace {

// Oracle stand-in: the model "knows" tau_true exactly with a degenerate
// posterior, and a strictly increasing outcome quantile curve.
ModelHooks oracle_hooks(const dgp::CausalDataset& ds, double spread) {
  ModelHooks hooks;
  hooks.effect_quantiles = [&ds, spread](std::size_t i, std::span<const double> us,
                                         std::span<double> out) {
    for (std::size_t j = 0; j < us.size(); ++j) {
      out[j] = ds.tau_true[i] + spread * (us[j] - 0.5);
    }
  };
  hooks.outcome_quantiles = [&ds](std::size_t i, std::span<const double> qs,
                                  std::span<double> out) {
    for (std::size_t j = 0; j < qs.size(); ++j) out[j] = ds.y[i] + qs[j];
  };
  hooks.point_summary = [&ds](std::size_t i) {
    UnitPrediction p;
    p.y_hat_mean = ds.y[i];
    p.y_hat_q50 = ds.y[i];
    p.pi_hat = ds.pi_true[i];
    return p;
  };
  return hooks;
}

}  // namespace

TEST_CASE("evaluate_hooks: oracle model scores perfectly") {
  const dgp::CausalDataset ds = dgp::gen_causal(80, 1.0, 31);
  const MetricsReport report = evaluate_hooks(ds, oracle_hooks(ds, 0.0), 128, 0.95, 7);
  CHECK(report.cate_rmse == doctest::Approx(0.0));
  CHECK(report.coverage == doctest::Approx(1.0));
  CHECK(report.avg_interval_length == doctest::Approx(0.0));
  CHECK(report.crossing_rate == doctest::Approx(0.0));
  CHECK(report.ate_est == doctest::Approx(report.ate_true).epsilon(1e-12));
  CHECK(report.ate_sq_err ==
        doctest::Approx((report.ate_true - report.ate_est) *
                        (report.ate_true - report.ate_est)));
}

TEST_CASE("evaluate_hooks: arbitrarily wide intervals cover everything") {
  const dgp::CausalDataset ds = dgp::gen_causal(60, 1.0, 33);
  const MetricsReport report = evaluate_hooks(ds, oracle_hooks(ds, 1e7), 128, 0.95, 7);
  CHECK(report.coverage == doctest::Approx(1.0));
  CHECK(report.avg_interval_length > 1e6);
}

TEST_CASE("evaluate_hooks: coverage is monotone in the level") {
  const dgp::CausalDataset ds = dgp::gen_causal(120, 1.0, 35);
  // miscalibrated oracle: narrow posteriors off the truth
  ModelHooks hooks = oracle_hooks(ds, 0.0);
  hooks.effect_quantiles = [&ds](std::size_t i, std::span<const double> us,
                                 std::span<double> out) {
    for (std::size_t j = 0; j < us.size(); ++j) {
      out[j] = ds.tau_true[i] + 0.4 * (us[j] - 0.8);  // biased, narrow
    }
  };
  const MetricsReport lo = evaluate_hooks(ds, hooks, 256, 0.5, 7);
  const MetricsReport mid = evaluate_hooks(ds, hooks, 256, 0.9, 7);
  const MetricsReport hi = evaluate_hooks(ds, hooks, 256, 0.99, 7);
  CHECK(lo.coverage <= mid.coverage);
  CHECK(mid.coverage <= hi.coverage);
}

TEST_CASE("evaluate: end-to-end on a small trained net, deterministic") {
  const dgp::CausalDataset ds = dgp::gen_causal(300, 1.0, 41);
  nn::TrainConfig cfg;
  cfg.epochs = 120;
  cfg.batch_size = 100;
  cfg.seed = 42;
  const causal::CausalQuantileNet net =
      causal::train_causal(ds.observational_view(), causal::CausalArch{}, cfg,
                           causal::LossWeights{});
  std::vector<UnitPrediction> per_unit;
  const MetricsReport a = evaluate(ds, net, 128, 0.95, 9, {}, &per_unit);
  const MetricsReport b = evaluate(ds, net, 128, 0.95, 9);
  CHECK(a.ate_est == b.ate_est);
  CHECK(a.cate_rmse == b.cate_rmse);
  CHECK(a.coverage == b.coverage);
  CHECK(a.pit_ks == b.pit_ks);
  CHECK(std::isfinite(a.ate_est));
  CHECK(std::isfinite(a.cate_rmse));
  CHECK(std::isfinite(a.baseline_cate_rmse));
  CHECK(a.coverage >= 0.0);
  CHECK(a.coverage <= 1.0);
  CHECK(a.crossing_rate >= 0.0);
  CHECK(a.crossing_rate <= 1.0);
  REQUIRE(per_unit.size() == ds.n);
  for (const auto& p : per_unit) {
    CHECK(std::isfinite(p.cate_mean));
    CHECK(p.ci_lo <= p.ci_hi);
    CHECK(p.pi_hat > 0.0);
    CHECK(p.pi_hat < 1.0);
  }
}

TEST_CASE("evaluate input validation") {
  const dgp::CausalDataset ds = dgp::gen_causal(50, 1.0, 51);
  nn::TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 25;
  const causal::CausalQuantileNet net =
      causal::train_causal(ds.observational_view(), causal::CausalArch{}, cfg,
                           causal::LossWeights{});
  CHECK_THROWS_AS((void)evaluate(ds.observational_view(), net, 128, 0.95, 1), ValueError);
  CHECK_THROWS_AS((void)evaluate(ds, net, 50, 0.95, 1), ValueError);
  CHECK_THROWS_AS((void)evaluate(ds, net, 128, 1.5, 1), ValueError);
}

TEST_CASE("report file and csv row formats") {
  namespace fs = std::filesystem;
  MetricsReport r;
  r.ate_true = 0.0123456789012345;
  r.ate_est = -0.5;
  r.ate_sq_err = 0.25;
  r.cate_rmse = 1.5;
  r.coverage = 0.93;
  r.avg_interval_length = 2.25;
  r.crossing_rate = 0.01;
  r.pit_ks = 0.04;
  r.baseline_cate_rmse = 2.0;
  r.n = 1000;
  r.M = 512;
  r.seed = 99;

  fs::create_directories("metrics_test_tmp");
  write_report_file(r, "metrics_test_tmp/report.txt");
  const KeyValueConfig kv = KeyValueConfig::load("metrics_test_tmp/report.txt");
  CHECK(kv.get_double("ate_true") == r.ate_true);  // 17 digits round-trips exactly
  CHECK(kv.get_double("coverage") == r.coverage);
  CHECK(kv.get_int("n") == 1000);

  const auto header = report_csv_header();
  const auto row = report_csv_row(r);
  REQUIRE(header.size() == row.size());
  CHECK(header[0] == "ate_true");
  CHECK(row[0] == format_double(r.ate_true));
  fs::remove_all("metrics_test_tmp");
}

TEST_CASE("metrics report validation") {
  MetricsReport r;
  r.coverage = 1.5;
  CHECK_THROWS_AS(r.validate(), ValueError);
  r.coverage = 0.5;
  r.pit_ks = std::nan("");
  CHECK_THROWS_AS(r.validate(), NumericError);
}
