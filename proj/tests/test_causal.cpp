#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "genbayes/causal.hpp"
#include "genbayes/losses.hpp"
#include "genbayes/stats.hpp"

using namespace genbayes;
using namespace genbayes::causal;

namespace {

CausalArch tiny_arch(nn::Activation act = nn::Activation::kRelu) {
  CausalArch arch;
  arch.x_dim = 2;
  arch.embed_dim = 2;
  arch.prop_hidden = 2;
  arch.block_width = 2;
  arch.hidden_activation = act;
  return arch;
}

// Pinned tiny net used by the hand-evaluation oracle.
CausalQuantileNet pinned_net() {
  Rng rng(1);
  CausalQuantileNet net = CausalQuantileNet::make(tiny_arch(), rng);
  net.embed_block.weights.data() = {0.2, -0.1, 0.3, 0.4};
  net.embed_block.bias = {0.05, -0.02};
  net.prop1.weights.data() = {0.5, 0.1, -0.2, 0.3};
  net.prop1.bias = {0.1, 0.2};
  net.prop2.weights.data() = {0.4, -0.3, 0.25, 0.15};
  net.prop2.bias = {0.05, 0.1};
  net.mu_block.weights.data() = {0.1, 0.2, 0.3, -0.1, 0.05, -0.15, 0.2, 0.25};
  net.mu_block.bias = {0.02, 0.03};
  net.tau_block.weights.data() = {0.3, -0.2, 0.1, 0.45};
  net.tau_block.bias = {0.01, -0.04};
  net.out_head.weights.data() = {0.7, -0.3, 0.2, 0.5};
  net.out_head.bias = {0.05, -0.05};
  return net;
}

double relu(double v) { return v > 0.0 ? v : 0.0; }
double sigm(double v) { return 1.0 / (1.0 + std::exp(-v)); }

double auc_score(const std::vector<double>& score, const std::vector<int>& label) {
  std::vector<std::size_t> idx(score.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  // midranks for ties
  std::vector<double> rank(score.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && score[idx[j + 1]] == score[idx[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = mid;
    i = j + 1;
  }
  double rank_sum = 0.0;
  std::size_t n1 = 0;
  for (std::size_t k = 0; k < label.size(); ++k) {
    if (label[k] == 1) {
      rank_sum += rank[k];
      ++n1;
    }
  }
  const std::size_t n0 = label.size() - n1;
  REQUIRE(n1 > 0);
  REQUIRE(n0 > 0);
  const double u = rank_sum - 0.5 * static_cast<double>(n1 * (n1 + 1));
  return u / (static_cast<double>(n1) * static_cast<double>(n0));
}

}  // namespace

TEST_CASE("cosine_embed: pinned values and domain errors") {
  const auto ones = cosine_embed(0.0, 8);
  for (double v : ones) CHECK(v == doctest::Approx(1.0));

  // q = 0.5: cos(i pi / 2) cycles 0, -1, 0, 1
  const auto half = cosine_embed(0.5, 8);
  const double cycle[4] = {0.0, -1.0, 0.0, 1.0};
  for (std::size_t i = 0; i < half.size(); ++i) {
    CHECK(half[i] == doctest::Approx(cycle[i % 4]).epsilon(1e-12));
  }

  // q = 1: alternating (-1)^i starting at i = 1
  const auto one = cosine_embed(1.0, 6);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i] == doctest::Approx(i % 2 == 0 ? -1.0 : 1.0));
  }

  CHECK(cosine_embed(0.3).size() == 32);
  CHECK_THROWS_AS((void)cosine_embed(-0.01, 4), ValueError);
  CHECK_THROWS_AS((void)cosine_embed(1.01, 4), ValueError);
}

TEST_CASE("forward_causal matches a straight-line hand evaluation") {
  const CausalQuantileNet net = pinned_net();
  const double x0 = 0.5, x1 = -0.3, q = 0.4;
  const double pi = 3.14159265358979323846;

  const double s00 = std::cos(1.0 * pi * q);
  const double s01 = std::cos(2.0 * pi * q);
  const double s0 = relu(0.2 * s00 - 0.1 * s01 + 0.05);
  const double s1 = relu(0.3 * s00 + 0.4 * s01 - 0.02);

  const double pt0 = relu(0.5 * x0 + 0.1 * x1 + 0.1);
  const double pt1 = relu(-0.2 * x0 + 0.3 * x1 + 0.2);
  const double ph0 = relu(0.4 * pt0 - 0.3 * pt1 + 0.05);
  const double ph1 = relu(0.25 * pt0 + 0.15 * pt1 + 0.1);
  const double gate0 = sigm(ph0);
  const double gate1 = sigm(ph1);
  const double zs = 0.5 * (gate0 + gate1);

  const double mf0 = relu(0.1 * x0 + 0.2 * x1 + 0.3 * pt0 - 0.1 * pt1 + 0.02);
  const double mf1 = relu(0.05 * x0 - 0.15 * x1 + 0.2 * pt0 + 0.25 * pt1 + 0.03);
  const double mu0 = s0 * mf0;
  const double mu1 = s1 * mf1;

  const double tf0 = relu(0.3 * x0 - 0.2 * x1 + 0.01);
  const double tf1 = relu(0.1 * x0 + 0.45 * x1 - 0.04);
  const double tau0 = s0 * tf0;
  const double tau1 = s1 * tf1;

  const double h0 = mu0 + tau0 * gate0;
  const double h1 = mu1 + tau1 * gate1;
  const double yhat0 = 0.7 * h0 - 0.3 * h1 + 0.05;
  const double yhat1 = 0.2 * h0 + 0.5 * h1 - 0.05;

  const std::vector<double> x{x0, x1};
  const CausalOutput out = forward_causal(net, x, q);
  CHECK(out.y_mean == doctest::Approx(yhat0).epsilon(1e-12));
  CHECK(out.y_quantile == doctest::Approx(yhat1).epsilon(1e-12));
  CHECK(out.z_prob == doctest::Approx(zs).epsilon(1e-12));
  REQUIRE(out.mu_vec.size() == 2);
  REQUIRE(out.tau_vec.size() == 2);
  CHECK(out.mu_vec[0] == doctest::Approx(mu0).epsilon(1e-12));
  CHECK(out.mu_vec[1] == doctest::Approx(mu1).epsilon(1e-12));
  CHECK(out.tau_vec[0] == doctest::Approx(tau0).epsilon(1e-12));
  CHECK(out.tau_vec[1] == doctest::Approx(tau1).epsilon(1e-12));

  // counterfactual difference equals the fast effect readout exactly
  const CausalOutput treated = forward_causal(net, x, q, GateMode::kForceTreated);
  const CausalOutput control = forward_causal(net, x, q, GateMode::kForceControl);
  CausalQuantileNet marked = net;
  marked.trained = true;
  CHECK(treated.y_quantile - control.y_quantile ==
        doctest::Approx(cate_effect_at(marked, x, q)).epsilon(1e-12));
}

TEST_CASE("forward_causal: output arity, input validation") {
  Rng rng(3);
  const CausalQuantileNet net = CausalQuantileNet::make(tiny_arch(), rng);
  const std::vector<double> x{0.1, 0.2};
  const CausalOutput out = forward_causal(net, x, 0.7);
  CHECK(std::isfinite(out.y_mean));
  CHECK(std::isfinite(out.y_quantile));

  const std::vector<double> bad{0.1, 0.2, 0.3};
  CHECK_THROWS_AS((void)forward_causal(net, bad, 0.5), DimensionError);
  CHECK_THROWS_AS((void)forward_causal(net, x, 1.5), ValueError);
  CHECK_THROWS_AS((void)forward_causal(net, x, -0.5), ValueError);
}

TEST_CASE("zeroed effect branch: outputs ignore the gate, draws are zero") {
  Rng rng(5);
  CausalQuantileNet net = CausalQuantileNet::make(tiny_arch(), rng);
  std::fill(net.tau_block.weights.data().begin(), net.tau_block.weights.data().end(), 0.0);
  std::fill(net.tau_block.bias.begin(), net.tau_block.bias.end(), 0.0);
  net.trained = true;

  const std::vector<double> x{0.4, -0.2};
  const CausalOutput a = forward_causal(net, x, 0.3, GateMode::kForceTreated);
  const CausalOutput b = forward_causal(net, x, 0.3, GateMode::kForceControl);
  CHECK(a.y_mean == doctest::Approx(b.y_mean).epsilon(1e-15));
  CHECK(a.y_quantile == doctest::Approx(b.y_quantile).epsilon(1e-15));

  const CatePosterior post = cate_posterior(net, x, 200, 7);
  for (double d : post.draws) CHECK(d == doctest::Approx(0.0));

  // default 3-covariate arch with a zeroed effect branch: Lorenz ATE is 0
  Rng rng2(6);
  CausalQuantileNet net3 = CausalQuantileNet::make(CausalArch{}, rng2);
  std::fill(net3.tau_block.weights.data().begin(), net3.tau_block.weights.data().end(), 0.0);
  std::fill(net3.tau_block.bias.begin(), net3.tau_block.bias.end(), 0.0);
  net3.trained = true;
  const dgp::CausalDataset ds = dgp::gen_causal(20, 1.0, 9);
  CHECK(ate_lorenz(net3, ds, 33) == doctest::Approx(0.0));
}

TEST_CASE("joint_loss matches an independent straight-line re-evaluation") {
  Rng rng(11);
  CausalArch arch;
  arch.x_dim = 3;
  arch.embed_dim = 8;
  arch.prop_hidden = 4;
  arch.block_width = 8;
  const CausalQuantileNet net = CausalQuantileNet::make(arch, rng);
  const dgp::CausalDataset ds = dgp::gen_causal(64, 1.0, 12);
  Rng qrng(13);
  std::vector<double> q(ds.n);
  for (auto& v : q) v = qrng.uniform();
  const LossWeights w{0.7, 1.3, 0.9, 0.5};
  const LossComponents got = joint_loss(net, ds, q, w);

  double lz = 0.0, lq = 0.0, lmse = 0.0, lcross = 0.0;
  for (std::size_t i = 0; i < ds.n; ++i) {
    const CausalOutput out = forward_causal(net, ds.x.row(i), q[i]);
    const double z = ds.z[i];
    const double p = std::clamp(out.z_prob, 1e-12, 1.0 - 1e-12);
    lz += -(z * std::log(p) + (1.0 - z) * std::log(1.0 - p));
    const double e2 = ds.y[i] - out.y_quantile;
    lq += std::max(q[i] * e2, (q[i] - 1.0) * e2);
    const double e1 = ds.y[i] - out.y_mean;
    lmse += e1 * e1;
    if (q[i] < 0.5) lcross += std::max(0.0, out.y_quantile - ds.y[i]);
    if (q[i] > 0.5) lcross += std::max(0.0, ds.y[i] - out.y_quantile);
  }
  const double n = static_cast<double>(ds.n);
  lz /= n; lq /= n; lmse /= n; lcross /= n;
  CHECK(got.l_z == doctest::Approx(lz).epsilon(1e-12));
  CHECK(got.l_q == doctest::Approx(lq).epsilon(1e-12));
  CHECK(got.l_mse == doctest::Approx(lmse).epsilon(1e-12));
  CHECK(got.l_cross == doctest::Approx(lcross).epsilon(1e-12));
  // decomposition re-sums exactly
  CHECK(got.total ==
        doctest::Approx(0.7 * lz + 1.3 * lq + 0.9 * lmse + 0.5 * lcross).epsilon(1e-12));
}

TEST_CASE("pinball terms at the median are symmetric") {
  CHECK(nn::pinball_loss(0.0, 2.0, 0.5) == doctest::Approx(1.0));   // e = +2
  CHECK(nn::pinball_loss(0.0, -2.0, 0.5) == doctest::Approx(1.0));  // e = -2
}

TEST_CASE("crossing_penalty: hinge cases and the q = 0.5 convention") {
  // q = 0.3, prediction below the realized value: no penalty
  CHECK(crossing_penalty(std::vector<double>{1.0}, std::vector<double>{0.5},
                         std::vector<double>{0.3}) == doctest::Approx(0.0));
  // q = 0.7, prediction one unit below: hinge magnitude 1
  CHECK(crossing_penalty(std::vector<double>{1.0}, std::vector<double>{0.0},
                         std::vector<double>{0.7}) == doctest::Approx(1.0));
  // q = 0.5 never contributes
  CHECK(crossing_penalty(std::vector<double>{1.0}, std::vector<double>{5.0},
                         std::vector<double>{0.5}) == doctest::Approx(0.0));
  CHECK(crossing_penalty(std::vector<double>{1.0}, std::vector<double>{-5.0},
                         std::vector<double>{0.5}) == doctest::Approx(0.0));
}

TEST_CASE("composite backward agrees with central finite differences") {
  // Per-unit joint loss; all four components active.  Seeds are scanned
  // deterministically until every kink has comfortable margin.
  const LossWeights w{1.0, 1.0, 1.0, 1.0};
  for (bool scalar_q : {false, true}) {
    CausalArch arch = tiny_arch();
    arch.x_dim = 3;
    arch.embed_dim = 4;
    arch.prop_hidden = 3;
    arch.block_width = 4;
    arch.scalar_q_gate = scalar_q;

    const std::uint64_t seed = 101;
    Rng seed_rng(seed);
    CausalQuantileNet net = CausalQuantileNet::make(arch, seed_rng);
    std::vector<double> x{0.8, -0.5, 0.3};
    double q = 0.31;
    double y = 0.0;
    CausalTrace trace;
    bool clean = false;
    for (int attempt = 0; attempt < 50 && !clean; ++attempt) {
      Rng r(seed + static_cast<std::uint64_t>(attempt));
      net = CausalQuantileNet::make(arch, r);
      for (auto& v : x) v = r.gaussian();
      q = 0.2 + 0.6 * r.uniform();
      forward_causal_into(net, x, q, GateMode::kLearned, trace);
      y = trace.yhat[1] + (r.uniform() < 0.5 ? 0.4 : -0.4);  // off the pinball kink
      clean = std::abs(q - 0.5) > 0.05;
      auto margin_ok = [](const std::vector<double>& pre) {
        for (double v : pre)
          if (std::abs(v) < 1e-3) return false;
        return true;
      };
      clean = clean && margin_ok(trace.pt_pre) && margin_ok(trace.ph_pre) &&
              margin_ok(trace.mf_pre) && margin_ok(trace.tf_pre) &&
              (scalar_q || margin_ok(trace.s_pre));
      clean = clean && std::abs(trace.yhat[0] - y) > 1e-2 &&
              std::abs(trace.yhat[1] - y) > 1e-2;
    }
    REQUIRE(clean);

    auto unit_loss = [&](const CausalQuantileNet& candidate) {
      CausalTrace t2;
      forward_causal_into(candidate, x, q, GateMode::kLearned, t2);
      const CausalOutput out = forward_causal(candidate, x, q);
      const double z = 1.0;
      double lz = 0.0;
      for (double g : t2.sigma_ph) {
        const double p = std::clamp(g, 1e-12, 1.0 - 1e-12);
        lz += -(z * std::log(p) + (1.0 - z) * std::log(1.0 - p));
      }
      double loss = w.w_z * lz / static_cast<double>(t2.sigma_ph.size());
      const double e2 = y - out.y_quantile;
      loss += w.w_q * std::max(q * e2, (q - 1.0) * e2);
      const double e1 = y - out.y_mean;
      loss += w.w_mse * e1 * e1;
      if (q < 0.5) loss += w.w_cross * std::max(0.0, out.y_quantile - y);
      if (q > 0.5) loss += w.w_cross * std::max(0.0, y - out.y_quantile);
      return loss;
    };

    forward_causal_into(net, x, q, GateMode::kLearned, trace);
    CausalGradients grads = CausalGradients::zeros_like(net);
    std::array<double, 2> d_yhat{};
    const double e1 = y - trace.yhat[0];
    d_yhat[0] = w.w_mse * (-2.0 * e1);
    d_yhat[1] = w.w_q * nn::pinball_loss_grad(trace.yhat[1], y, q) +
                w.w_cross * nn::crossing_penalty_term_grad(trace.yhat[1], y, q);
    backward_causal_accumulate(net, trace, d_yhat, w.w_z, 1.0, grads);

    const double step = 1e-6;
    double max_err = 0.0;
    auto probe = [&](double& param, double analytic) {
      const double saved = param;
      param = saved + step;
      const double up = unit_loss(net);
      param = saved - step;
      const double down = unit_loss(net);
      param = saved;
      const double numeric = (up - down) / (2.0 * step);
      max_err = std::max(max_err, std::abs(analytic - numeric) /
                                      std::max(1.0, std::abs(analytic) + std::abs(numeric)));
    };
    auto probe_block = [&](nn::DenseLayer& layer, Matrix& dW, std::vector<double>& db) {
      for (std::size_t i = 0; i < layer.weights.size(); ++i)
        probe(layer.weights.data()[i], dW.data()[i]);
      for (std::size_t i = 0; i < layer.bias.size(); ++i) probe(layer.bias[i], db[i]);
    };
    probe_block(net.embed_block, grads.d_embed_w, grads.d_embed_b);
    probe_block(net.prop1, grads.d_prop1_w, grads.d_prop1_b);
    probe_block(net.prop2, grads.d_prop2_w, grads.d_prop2_b);
    probe_block(net.mu_block, grads.d_mu_w, grads.d_mu_b);
    probe_block(net.tau_block, grads.d_tau_w, grads.d_tau_b);
    probe_block(net.out_head, grads.d_out_w, grads.d_out_b);

    CHECK(max_err < 1e-4);
  }
}

TEST_CASE("train_causal: smoke run keeps every component finite and informative") {
  const dgp::CausalDataset ds = dgp::gen_causal(50, 1.0, 21).observational_view();
  CausalArch arch;
  nn::TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 25;
  cfg.seed = 22;
  TrainResultTrace trace;
  const CausalQuantileNet net = train_causal(ds, arch, cfg, LossWeights{}, &trace);
  CHECK(net.trained);
  REQUIRE(trace.epochs.size() == 200);
  for (const auto& c : trace.epochs) {
    CHECK(std::isfinite(c.total));
    CHECK(std::isfinite(c.l_z));
    CHECK(std::isfinite(c.l_q));
    CHECK(std::isfinite(c.l_mse));
    CHECK(std::isfinite(c.l_cross));
  }
  CHECK(trace.epochs.back().l_z < std::log(2.0));
}

TEST_CASE("train_causal: determinism under a fixed seed") {
  const dgp::CausalDataset ds = dgp::gen_causal(60, 1.0, 31).observational_view();
  nn::TrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 20;
  cfg.seed = 33;
  const CausalQuantileNet a = train_causal(ds, CausalArch{}, cfg, LossWeights{});
  const CausalQuantileNet b = train_causal(ds, CausalArch{}, cfg, LossWeights{});
  CHECK(a.out_head.weights.data() == b.out_head.weights.data());
  CHECK(a.tau_block.weights.data() == b.tau_block.weights.data());
  CHECK(a.prop2.weights.data() == b.prop2.weights.data());
}

TEST_CASE("propensity-only training separates arms; shuffled labels do not") {
  const dgp::CausalDataset full = dgp::gen_causal(1000, 1.0, 41);
  const dgp::CausalDataset ds = full.observational_view();
  nn::TrainConfig cfg;
  cfg.epochs = 150;
  cfg.batch_size = 100;
  cfg.seed = 42;
  const LossWeights prop_only{1.0, 0.0, 0.0, 0.0};
  const CausalQuantileNet net = train_causal(ds, CausalArch{}, cfg, prop_only);

  std::vector<double> zhat(ds.n);
  for (std::size_t i = 0; i < ds.n; ++i) {
    zhat[i] = forward_causal(net, ds.x.row(i), 0.5).z_prob;
  }
  CHECK(auc_score(zhat, ds.z) > 0.9);

  // permutation null, averaged over permutations: the net regresses the
  // shuffled labels on x and amplifies their chance in-sample alignment
  // with pi(x), so a single permutation has a wide AUC spread; the mean
  // recovers 0.5.
  double auc_sum = 0.0;
  const std::size_t perms = 5;
  for (std::uint64_t ps = 0; ps < perms; ++ps) {
    dgp::CausalDataset shuffled = ds;
    Rng perm_rng(derive_seed(43, ps));
    perm_rng.shuffle(shuffled.z);
    nn::TrainConfig null_cfg = cfg;
    null_cfg.seed = derive_seed(44, ps);
    TrainResultTrace trace;
    const CausalQuantileNet null_net =
        train_causal(shuffled, CausalArch{}, null_cfg, prop_only, &trace);
    std::vector<double> zhat_null(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
      zhat_null[i] = forward_causal(null_net, ds.x.row(i), 0.5).z_prob;
    }
    auc_sum += auc_score(zhat_null, ds.z);
    CHECK(trace.epochs.back().l_z > 0.55);
    CHECK(trace.epochs.back().l_z < 0.75);
  }
  CHECK(std::abs(auc_sum / static_cast<double>(perms) - 0.5) < 0.05);
}

TEST_CASE("cate_posterior: determinism, seed sensitivity, trained-net guard") {
  Rng rng(51);
  CausalQuantileNet net = CausalQuantileNet::make(CausalArch{}, rng);
  const std::vector<double> x{0.2, -0.4, 0.9};
  CHECK_THROWS_AS((void)cate_posterior(net, x, 200, 1), ValueError);
  net.trained = true;
  const CatePosterior a = cate_posterior(net, x, 200, 5);
  const CatePosterior b = cate_posterior(net, x, 200, 5);
  const CatePosterior c = cate_posterior(net, x, 200, 6);
  CHECK(a.draws == b.draws);
  CHECK(a.draws != c.draws);
  CHECK_THROWS_AS((void)cate_posterior(net, x, 0, 1), ValueError);
}

TEST_CASE("ate_lorenz: midpoint rule is exact for a linear-in-q readout") {
  // scalar-q gating makes the effect readout linear in q with zero
  // intercept, so any midpoint grid equals the value at q = 0.5.
  CausalArch arch;
  arch.scalar_q_gate = true;
  Rng rng(61);
  CausalQuantileNet net = CausalQuantileNet::make(arch, rng);
  net.trained = true;
  const dgp::CausalDataset ds = dgp::gen_causal(40, 1.0, 62);
  double mid = 0.0;
  for (std::size_t i = 0; i < ds.n; ++i) {
    mid += cate_effect_at(net, ds.x.row(i), 0.5);
  }
  mid /= static_cast<double>(ds.n);
  for (std::size_t grid : {std::size_t{1}, std::size_t{7}, std::size_t{99}}) {
    CHECK(ate_lorenz(net, ds, grid) == doctest::Approx(mid).epsilon(1e-12));
  }
}

TEST_CASE("credible_interval: order statistics, nesting, validation") {
  CatePosterior post;
  post.draws.assign(150, 3.25);
  const auto [clo, chi] = credible_interval(post, 0.9);
  CHECK(clo == doctest::Approx(3.25));
  CHECK(chi == doctest::Approx(3.25));

  post.draws.resize(100);
  for (std::size_t i = 0; i < 100; ++i) post.draws[i] = static_cast<double>(i + 1);
  const auto [lo, hi] = credible_interval(post, 0.9);
  CHECK(lo == doctest::Approx(5.0));   // ceil(0.05 * 100) = 5th order statistic
  CHECK(hi == doctest::Approx(95.0));  // ceil(0.95 * 100) = 95th

  double prev_lo = lo, prev_hi = hi;
  for (double level : {0.95, 0.99}) {
    const auto [l2, h2] = credible_interval(post, level);
    CHECK(l2 <= prev_lo);
    CHECK(h2 >= prev_hi);
    prev_lo = l2;
    prev_hi = h2;
  }

  post.draws.resize(99);
  CHECK_THROWS_AS((void)credible_interval(post, 0.9), ValueError);
  post.draws.resize(150, 1.0);
  CHECK_THROWS_AS((void)credible_interval(post, 0.0), ValueError);
  CHECK_THROWS_AS((void)credible_interval(post, 1.0), ValueError);
}

TEST_CASE("loss weights validation") {
  const LossWeights negative{-0.1, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(negative.validate(), ValueError);
  const LossWeights all_zero{0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(all_zero.validate(), ValueError);
  const LossWeights one_hot{0.0, 1.0, 0.0, 0.0};
  CHECK_NOTHROW(one_hot.validate());
}

TEST_CASE("saturated propensity readout is clamped and counted") {
  Rng rng(71);
  CausalQuantileNet net = CausalQuantileNet::make(CausalArch{}, rng);
  // push every gate component into saturation: sigmoid(1000) == 1.0 in doubles
  std::fill(net.prop2.bias.begin(), net.prop2.bias.end(), 1000.0);
  const dgp::CausalDataset ds = dgp::gen_causal(10, 1.0, 72);
  std::vector<double> q(ds.n, 0.4);
  const LossComponents comp = joint_loss(net, ds, q, LossWeights{});
  CHECK(comp.clamp_count > 0);
  CHECK(std::isfinite(comp.l_z));
}

TEST_CASE("causal checkpoint round trip preserves behavior") {
  namespace fs = std::filesystem;
  const dgp::CausalDataset ds = dgp::gen_causal(40, 1.0, 81).observational_view();
  nn::TrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 20;
  cfg.seed = 82;
  const CausalQuantileNet net = train_causal(ds, CausalArch{}, cfg, LossWeights{});

  fs::create_directories("causal_test_tmp");
  Checkpoint ckpt;
  save_causal_net(ckpt, net);
  ckpt.save("causal_test_tmp/net.ckpt");
  const CausalQuantileNet loaded = load_causal_net(Checkpoint::load("causal_test_tmp/net.ckpt"));
  CHECK(loaded.trained);
  const std::vector<double> x{0.3, -0.1, 0.6};
  for (double q : {0.1, 0.5, 0.9}) {
    const CausalOutput a = forward_causal(net, x, q);
    const CausalOutput b = forward_causal(loaded, x, q);
    CHECK(a.y_mean == b.y_mean);
    CHECK(a.y_quantile == b.y_quantile);
    CHECK(a.z_prob == b.z_prob);
  }
  fs::remove_all("causal_test_tmp");
}
