#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "genbayes/dgp.hpp"
#include "genbayes/linalg.hpp"
#include "genbayes/stats.hpp"

using namespace genbayes;
using namespace genbayes::dgp;

TEST_CASE("generating formulas at pinned points") {
  // x = (0,0,0): mu = -6 + 0 + 6 = 0, pi = 0.5, tau_raw = 1
  CHECK(causal_mu(0.0, 0.0) == doctest::Approx(0.0));
  CHECK(causal_tau_raw(0.0, 0.0) == doctest::Approx(1.0));
  // x = (1,1,0): indicator is 0 (not strict), |x2-1| = 0 -> mu = -6
  CHECK(causal_mu(1.0, 1.0) == doctest::Approx(-6.0));
  CHECK(1.0 / (1.0 + std::exp(6.0)) == doctest::Approx(0.0024726231566347743));
  CHECK(causal_tau_raw(1.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("gen_causal columns are internally consistent") {
  const CausalDataset ds = gen_causal(500, 1.0, 42);
  REQUIRE(ds.n == 500);
  REQUIRE(ds.p == 3);
  REQUIRE(ds.x.rows() == 500);
  REQUIRE(ds.z.size() == 500);
  REQUIRE(ds.y.size() == 500);
  REQUIRE(ds.tau_true.size() == 500);
  for (std::size_t i = 0; i < ds.n; ++i) {
    CHECK(ds.mu_true[i] == doctest::Approx(causal_mu(ds.x(i, 0), ds.x(i, 1))));
    CHECK(ds.pi_true[i] ==
          doctest::Approx(1.0 / (1.0 + std::exp(-ds.mu_true[i]))));
    CHECK(ds.tau_raw[i] == doctest::Approx(causal_tau_raw(ds.x(i, 1), ds.x(i, 2))));
    CHECK(ds.pi_true[i] > 0.0);
    CHECK(ds.pi_true[i] < 1.0);
    CHECK((ds.z[i] == 0 || ds.z[i] == 1));
    CHECK(ds.tau_true[i] == doctest::Approx((ds.tau_raw[i] - ds.tau_mean) / ds.tau_sd));
  }
  // standardization: mean 0, population variance 1
  CHECK(std::abs(stats::mean(ds.tau_true)) < 1e-9);
  CHECK(std::abs(stats::variance(ds.tau_true) - 1.0) < 1e-9);
}

TEST_CASE("gen_causal rejects bad arguments") {
  CHECK_THROWS_AS((void)gen_causal(0, 1.0, 1), ValueError);
  CHECK_THROWS_AS((void)gen_causal(10, -0.5, 1), ValueError);
  GenCausalOptions opts;
  opts.p = 2;
  CHECK_THROWS_AS((void)gen_causal(10, 1.0, 1, opts), ValueError);
}

TEST_CASE("gen_causal is reproducible and seeds matter") {
  const CausalDataset a = gen_causal(200, 1.0, 9);
  const CausalDataset b = gen_causal(200, 1.0, 9);
  const CausalDataset c = gen_causal(200, 1.0, 10);
  CHECK(a.x.data() == b.x.data());
  CHECK(a.y == b.y);
  CHECK(a.z == b.z);
  CHECK(a.y != c.y);
}

TEST_CASE("tau_raw population moments: mean 1, variance 4") {
  const CausalDataset ds = gen_causal(1000000, 1.0, 7);
  const double m = stats::mean(ds.tau_raw);
  const double v = stats::variance(ds.tau_raw);
  // MC sd of the mean is 2/1000; of the variance about 0.0113
  CHECK(std::abs(m - 1.0) < 3.0 * 0.002);
  CHECK(std::abs(v - 4.0) < 3.0 * 0.0113);
}

TEST_CASE("covariates pass moment checks and z matches pi") {
  const std::size_t n = 1000000;
  const CausalDataset ds = gen_causal(n, 1.0, 13);
  for (std::size_t j = 0; j < 3; ++j) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = ds.x(i, j);
    CHECK(std::abs(stats::mean(col)) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(stats::variance(col) - 1.0) < 0.01);
  }
  double zbar = 0.0, pibar = 0.0, pivar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    zbar += ds.z[i];
    pibar += ds.pi_true[i];
    pivar += ds.pi_true[i] * (1.0 - ds.pi_true[i]);
  }
  zbar /= static_cast<double>(n);
  pibar /= static_cast<double>(n);
  const double binom_sd = std::sqrt(pivar) / static_cast<double>(n);
  CHECK(std::abs(zbar - pibar) < 3.0 * binom_sd);
}

namespace {

// Logistic-fit deviance via IRLS; the conditional-independence oracle.
double logistic_deviance(const Matrix& X, const std::vector<int>& z) {
  const std::size_t n = X.rows();
  const std::size_t p = X.cols();
  std::vector<double> beta(p, 0.0);
  for (int iter = 0; iter < 25; ++iter) {
    Matrix xtwx(p, p);
    std::vector<double> score(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = X.row(i);
      double eta = 0.0;
      for (std::size_t j = 0; j < p; ++j) eta += row[j] * beta[j];
      const double mu = 1.0 / (1.0 + std::exp(-eta));
      const double w = std::max(mu * (1.0 - mu), 1e-10);
      for (std::size_t j = 0; j < p; ++j) {
        score[j] += row[j] * (static_cast<double>(z[i]) - mu);
        for (std::size_t k = j; k < p; ++k) xtwx(j, k) += w * row[j] * row[k];
      }
    }
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < j; ++k) xtwx(j, k) = xtwx(k, j);
    const Matrix L = linalg::cholesky(xtwx);
    const std::vector<double> delta = linalg::cholesky_solve(L, score);
    double step = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      beta[j] += delta[j];
      step = std::max(step, std::abs(delta[j]));
    }
    if (step < 1e-10) break;
  }
  double dev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = X.row(i);
    double eta = 0.0;
    for (std::size_t j = 0; j < p; ++j) eta += row[j] * beta[j];
    const double mu = 1.0 / (1.0 + std::exp(-eta));
    const double pc = std::clamp(mu, 1e-12, 1.0 - 1e-12);
    dev -= 2.0 * (z[i] * std::log(pc) + (1 - z[i]) * std::log(1.0 - pc));
  }
  return dev;
}

}  // namespace

TEST_CASE("z depends on x only through pi: adding x to the true logit gains nothing") {
  const CausalDataset ds = gen_causal(4000, 1.0, 31);
  const std::size_t n = ds.n;
  Matrix base(n, 2);
  Matrix full(n, 5);
  for (std::size_t i = 0; i < n; ++i) {
    base(i, 0) = 1.0;
    base(i, 1) = ds.mu_true[i];  // the true logit of pi
    full(i, 0) = 1.0;
    full(i, 1) = ds.mu_true[i];
    for (std::size_t j = 0; j < 3; ++j) full(i, 2 + j) = ds.x(i, j);
  }
  const double gain = logistic_deviance(base, ds.z) - logistic_deviance(full, ds.z);
  CHECK(gain >= -1e-6);
  CHECK(gain < 16.27);  // chi^2_3 99.9th percentile
}

TEST_CASE("standardize_tau two-point example and conventions") {
  const std::vector<double> raw{0.0, 2.0};
  const StandardizedTau st = standardize_tau(raw);
  CHECK(st.mean == doctest::Approx(1.0));
  CHECK(st.sd == doctest::Approx(1.0));  // population divisor n
  CHECK(st.tau_std[0] == doctest::Approx(-1.0));
  CHECK(st.tau_std[1] == doctest::Approx(1.0));
}

TEST_CASE("standardize_tau is idempotent") {
  const CausalDataset ds = gen_causal(1000, 1.0, 3);
  const StandardizedTau once = standardize_tau(ds.tau_raw);
  const StandardizedTau twice = standardize_tau(once.tau_std);
  CHECK(std::abs(twice.mean) < 1e-12);
  CHECK(twice.sd == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(twice.tau_std[i] == doctest::Approx(once.tau_std[i]).epsilon(1e-12));
  }
}

TEST_CASE("standardize_tau input validation") {
  CHECK_THROWS_AS((void)standardize_tau(std::vector<double>{1.0}), ValueError);
  CHECK_THROWS_AS((void)standardize_tau(std::vector<double>{2.0, 2.0, 2.0}), ValueError);
}

TEST_CASE("standardize_tau at scale: mean about 1, sd about 2") {
  const CausalDataset ds = gen_causal(1000000, 1.0, 17);
  const StandardizedTau st = standardize_tau(ds.tau_raw);
  CHECK(std::abs(st.mean - 1.0) < 0.01);
  CHECK(std::abs(st.sd - 2.0) < 0.02);
}

TEST_CASE("gen_conjugate hierarchical structure") {
  const std::size_t N = 100000;
  const ConjugateDataset ds = gen_conjugate(N, 0.0, 1.0, 1.0, 5);
  REQUIRE(ds.theta.size() == N);
  REQUIRE(ds.y.rows() == N);
  REQUIRE(ds.y.cols() == 1);

  // corr(theta, y) = prior_sd / sqrt(prior_sd^2 + like_sd^2) = 1/sqrt(2)
  std::vector<double> ycol(N);
  for (std::size_t i = 0; i < N; ++i) ycol[i] = ds.y(i, 0);
  CHECK(stats::correlation(ds.theta, ycol) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02));

  // LLN: sample mean of theta near the prior mean
  CHECK(std::abs(stats::mean(ds.theta)) < 3.0 / std::sqrt(static_cast<double>(N)));

  // law of total variance: Var(y) = prior_sd^2 + like_sd^2
  CHECK(stats::variance(ycol) == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("gen_conjugate parameter validation") {
  CHECK_THROWS_AS((void)gen_conjugate(0, 0.0, 1.0, 1.0, 1), ValueError);
  CHECK_THROWS_AS((void)gen_conjugate(10, 0.0, 0.0, 1.0, 1), ValueError);
  CHECK_THROWS_AS((void)gen_conjugate(10, 0.0, 1.0, -1.0, 1), ValueError);
}

TEST_CASE("true_ate: standardized effects average to zero") {
  const CausalDataset ds = gen_causal(5000, 1.0, 23);
  CHECK(std::abs(true_ate(ds)) < 1e-9);
  CHECK(std::abs(stats::mean(ds.tau_raw) - 1.0) < 0.1);

  CausalDataset two;
  two.n = 2;
  two.tau_true = {-1.0, 1.0};
  CHECK(true_ate(two) == doctest::Approx(0.0));

  const CausalDataset obs = ds.observational_view();
  CHECK_THROWS_AS((void)true_ate(obs), ValueError);
}

TEST_CASE("dataset csv round trip, full and observational views") {
  namespace fs = std::filesystem;
  fs::create_directories("dgp_test_tmp");
  const CausalDataset ds = gen_causal(50, 0.5, 77);

  write_dataset_csv(ds, "dgp_test_tmp/full.csv", true);
  const CausalDataset full = read_dataset_csv("dgp_test_tmp/full.csv");
  REQUIRE(full.n == ds.n);
  REQUIRE(full.has_ground_truth());
  for (std::size_t i = 0; i < ds.n; ++i) {
    CHECK(full.x(i, 0) == ds.x(i, 0));  // %.17g round trip is exact
    CHECK(full.y[i] == ds.y[i]);
    CHECK(full.tau_true[i] == ds.tau_true[i]);
    CHECK(full.z[i] == ds.z[i]);
  }

  write_dataset_csv(ds.observational_view(), "dgp_test_tmp/obs.csv", false);
  const CausalDataset obs = read_dataset_csv("dgp_test_tmp/obs.csv");
  CHECK(obs.n == ds.n);
  CHECK(!obs.has_ground_truth());
  fs::remove_all("dgp_test_tmp");
}
