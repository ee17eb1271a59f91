#include "genbayes/causal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "genbayes/losses.hpp"
#include "genbayes/stats.hpp"

namespace genbayes::causal {

namespace {

using nn::Activation;
using nn::DenseLayer;

void dense_forward(const DenseLayer& layer, std::span<const double> in,
                   std::vector<double>& pre, std::vector<double>& post) {
  const std::size_t out = layer.out_dim();
  const std::size_t ind = layer.in_dim();
  if (in.size() != ind) {
    throw DimensionError("causal block: input length " + std::to_string(in.size()) +
                         " != " + std::to_string(ind));
  }
  pre.resize(out);
  post.resize(out);
  for (std::size_t i = 0; i < out; ++i) {
    const double* w = layer.weights.data().data() + i * ind;
    double acc = layer.bias[i];
    for (std::size_t j = 0; j < ind; ++j) acc += w[j] * in[j];
    pre[i] = acc;
    post[i] = nn::activate(layer.activation, acc);
  }
}

// delta_post = dLoss/d(post).  Accumulates parameter gradients; when
// d_in is nonempty, adds W^T delta_pre into it.
void dense_backward(const DenseLayer& layer, std::span<const double> in,
                    const std::vector<double>& pre, const std::vector<double>& post,
                    std::span<const double> delta_post, Matrix& d_weights,
                    std::vector<double>& d_bias, std::span<double> d_in) {
  const std::size_t out = layer.out_dim();
  const std::size_t ind = layer.in_dim();
  for (std::size_t i = 0; i < out; ++i) {
    const double dp = delta_post[i] * nn::activate_grad(layer.activation, pre[i], post[i]);
    double* dw = d_weights.data().data() + i * ind;
    for (std::size_t j = 0; j < ind; ++j) dw[j] += dp * in[j];
    d_bias[i] += dp;
    if (!d_in.empty()) {
      const double* w = layer.weights.data().data() + i * ind;
      for (std::size_t j = 0; j < ind; ++j) d_in[j] += dp * w[j];
    }
  }
}

DenseLayer make_block(std::size_t in, std::size_t out, Activation act, Rng& rng) {
  DenseLayer layer(in, out, act);
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  for (auto& w : layer.weights.data()) w = rng.uniform(-limit, limit);
  return layer;
}

}  // namespace

void CausalArch::validate() const {
  if (x_dim == 0 || embed_dim == 0 || prop_hidden == 0 || block_width == 0) {
    throw ValueError("CausalArch: all widths must be >= 1");
  }
}

void LossWeights::validate() const {
  if (w_z < 0.0 || w_q < 0.0 || w_mse < 0.0 || w_cross < 0.0) {
    throw ValueError("LossWeights: weights must be nonnegative");
  }
  if (w_z == 0.0 && w_q == 0.0 && w_mse == 0.0 && w_cross == 0.0) {
    throw ValueError("LossWeights: at least one weight must be positive");
  }
}

CausalQuantileNet CausalQuantileNet::make(const CausalArch& arch, Rng& rng) {
  arch.validate();
  CausalQuantileNet net;
  net.arch = arch;
  const auto act = arch.hidden_activation;
  net.embed_block = make_block(arch.embed_dim, arch.block_width, act, rng);
  net.prop1 = make_block(arch.x_dim, arch.prop_hidden, act, rng);
  net.prop2 = make_block(arch.prop_hidden, arch.block_width, act, rng);
  net.mu_block = make_block(arch.x_dim + arch.prop_hidden, arch.block_width, act, rng);
  net.tau_block = make_block(arch.x_dim, arch.block_width, act, rng);
  net.out_head = make_block(arch.block_width, 2, Activation::kIdentity, rng);
  return net;
}

std::size_t CausalQuantileNet::num_params() const {
  return embed_block.weights.size() + embed_block.bias.size() + prop1.weights.size() +
         prop1.bias.size() + prop2.weights.size() + prop2.bias.size() +
         mu_block.weights.size() + mu_block.bias.size() + tau_block.weights.size() +
         tau_block.bias.size() + out_head.weights.size() + out_head.bias.size();
}

void CausalQuantileNet::validate() const {
  arch.validate();
  embed_block.validate();
  prop1.validate();
  prop2.validate();
  mu_block.validate();
  tau_block.validate();
  out_head.validate();
  if (out_head.out_dim() != 2) {
    throw DimensionError("CausalQuantileNet: output head must be 2-dimensional");
  }
}

void forward_causal_into(const CausalQuantileNet& net, std::span<const double> x,
                         double q, GateMode mode, CausalTrace& trace) {
  const auto& arch = net.arch;
  if (x.size() != arch.x_dim) {
    throw DimensionError("forward_causal: x length " + std::to_string(x.size()) +
                         " != " + std::to_string(arch.x_dim));
  }
  if (q < 0.0 || q > 1.0) throw ValueError("forward_causal: q outside [0,1]");

  trace.x.assign(x.begin(), x.end());
  trace.q = q;
  trace.gate_mode = mode;

  trace.s0.resize(arch.embed_dim);
  cosine_embed_into(q, trace.s0);
  if (!arch.scalar_q_gate) {
    dense_forward(net.embed_block, trace.s0, trace.s_pre, trace.s);
  } else {
    trace.s_pre.clear();
    trace.s.assign(arch.block_width, q);
  }

  dense_forward(net.prop1, x, trace.pt_pre, trace.pt);
  dense_forward(net.prop2, trace.pt, trace.ph_pre, trace.ph);

  trace.sigma_ph.resize(arch.block_width);
  double zacc = 0.0;
  for (std::size_t i = 0; i < arch.block_width; ++i) {
    trace.sigma_ph[i] = nn::sigmoid(trace.ph[i]);
    zacc += trace.sigma_ph[i];
  }
  trace.zs = zacc / static_cast<double>(arch.block_width);

  trace.gate.resize(arch.block_width);
  switch (mode) {
    case GateMode::kLearned:
      trace.gate = trace.sigma_ph;
      break;
    case GateMode::kForceTreated:
      std::fill(trace.gate.begin(), trace.gate.end(), 1.0);
      break;
    case GateMode::kForceControl:
      std::fill(trace.gate.begin(), trace.gate.end(), 0.0);
      break;
  }

  trace.m_in.resize(arch.x_dim + arch.prop_hidden);
  std::copy(x.begin(), x.end(), trace.m_in.begin());
  std::copy(trace.pt.begin(), trace.pt.end(),
            trace.m_in.begin() + static_cast<std::ptrdiff_t>(arch.x_dim));
  dense_forward(net.mu_block, trace.m_in, trace.mf_pre, trace.mf);
  dense_forward(net.tau_block, x, trace.tf_pre, trace.tf);

  trace.mu.resize(arch.block_width);
  trace.tau.resize(arch.block_width);
  trace.h.resize(arch.block_width);
  for (std::size_t i = 0; i < arch.block_width; ++i) {
    trace.mu[i] = trace.s[i] * trace.mf[i];
    trace.tau[i] = trace.s[i] * trace.tf[i];
    trace.h[i] = trace.mu[i] + trace.tau[i] * trace.gate[i];
  }

  for (std::size_t r = 0; r < 2; ++r) {
    const double* w = net.out_head.weights.data().data() + r * arch.block_width;
    double acc = net.out_head.bias[r];
    for (std::size_t i = 0; i < arch.block_width; ++i) acc += w[i] * trace.h[i];
    trace.yhat[r] = acc;
  }
}

CausalOutput forward_causal(const CausalQuantileNet& net, std::span<const double> x,
                            double q, GateMode mode) {
  CausalTrace trace;
  forward_causal_into(net, x, q, mode, trace);
  CausalOutput out;
  out.y_mean = trace.yhat[0];
  out.y_quantile = trace.yhat[1];
  out.z_prob = trace.zs;
  out.mu_vec = trace.mu;
  out.tau_vec = trace.tau;
  return out;
}

CausalGradients CausalGradients::zeros_like(const CausalQuantileNet& net) {
  CausalGradients g;
  g.d_embed_w = Matrix(net.embed_block.out_dim(), net.embed_block.in_dim());
  g.d_embed_b.assign(net.embed_block.out_dim(), 0.0);
  g.d_prop1_w = Matrix(net.prop1.out_dim(), net.prop1.in_dim());
  g.d_prop1_b.assign(net.prop1.out_dim(), 0.0);
  g.d_prop2_w = Matrix(net.prop2.out_dim(), net.prop2.in_dim());
  g.d_prop2_b.assign(net.prop2.out_dim(), 0.0);
  g.d_mu_w = Matrix(net.mu_block.out_dim(), net.mu_block.in_dim());
  g.d_mu_b.assign(net.mu_block.out_dim(), 0.0);
  g.d_tau_w = Matrix(net.tau_block.out_dim(), net.tau_block.in_dim());
  g.d_tau_b.assign(net.tau_block.out_dim(), 0.0);
  g.d_out_w = Matrix(net.out_head.out_dim(), net.out_head.in_dim());
  g.d_out_b.assign(net.out_head.out_dim(), 0.0);
  return g;
}

void CausalGradients::set_zero() {
  auto zero_m = [](Matrix& m) { std::fill(m.data().begin(), m.data().end(), 0.0); };
  auto zero_v = [](std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); };
  zero_m(d_embed_w);
  zero_v(d_embed_b);
  zero_m(d_prop1_w);
  zero_v(d_prop1_b);
  zero_m(d_prop2_w);
  zero_v(d_prop2_b);
  zero_m(d_mu_w);
  zero_v(d_mu_b);
  zero_m(d_tau_w);
  zero_v(d_tau_b);
  zero_m(d_out_w);
  zero_v(d_out_b);
}

void CausalGradients::scale(double f) {
  auto sc_m = [f](Matrix& m) {
    for (auto& v : m.data()) v *= f;
  };
  auto sc_v = [f](std::vector<double>& v) {
    for (auto& x : v) x *= f;
  };
  sc_m(d_embed_w);
  sc_v(d_embed_b);
  sc_m(d_prop1_w);
  sc_v(d_prop1_b);
  sc_m(d_prop2_w);
  sc_v(d_prop2_b);
  sc_m(d_mu_w);
  sc_v(d_mu_b);
  sc_m(d_tau_w);
  sc_v(d_tau_b);
  sc_m(d_out_w);
  sc_v(d_out_b);
}

void backward_causal_accumulate(const CausalQuantileNet& net, const CausalTrace& trace,
                                const std::array<double, 2>& d_yhat, double d_lz_scale,
                                double z_label, CausalGradients& acc) {
  const auto& arch = net.arch;
  const std::size_t bw = arch.block_width;

  // out_head (affine): dW6 += d_yhat (x) h; dh = W6^T d_yhat.
  std::vector<double> dh(bw, 0.0);
  for (std::size_t r = 0; r < 2; ++r) {
    const double d = d_yhat[r];
    double* dw = acc.d_out_w.data().data() + r * bw;
    const double* w = net.out_head.weights.data().data() + r * bw;
    for (std::size_t i = 0; i < bw; ++i) {
      dw[i] += d * trace.h[i];
      dh[i] += d * w[i];
    }
    acc.d_out_b[r] += d;
  }

  // h = mu + tau o gate, mu = s o mf, tau = s o tf.
  std::vector<double> dmf(bw), dtf(bw), ds(bw, 0.0), dgate(bw);
  for (std::size_t i = 0; i < bw; ++i) {
    const double dmu = dh[i];
    const double dtau = dh[i] * trace.gate[i];
    dgate[i] = dh[i] * trace.tau[i];
    dmf[i] = dmu * trace.s[i];
    dtf[i] = dtau * trace.s[i];
    if (!arch.scalar_q_gate) {
      ds[i] = dmu * trace.mf[i] + dtau * trace.tf[i];
    }
  }

  dense_backward(net.tau_block, trace.x, trace.tf_pre, trace.tf, dtf, acc.d_tau_w,
                 acc.d_tau_b, {});

  std::vector<double> d_m_in(arch.x_dim + arch.prop_hidden, 0.0);
  dense_backward(net.mu_block, trace.m_in, trace.mf_pre, trace.mf, dmf, acc.d_mu_w,
                 acc.d_mu_b, d_m_in);

  if (!arch.scalar_q_gate) {
    dense_backward(net.embed_block, trace.s0, trace.s_pre, trace.s, ds, acc.d_embed_w,
                   acc.d_embed_b, {});
  }

  // ph collects the learned-gate path and the component-mean Bernoulli term.
  std::vector<double> dph(bw, 0.0);
  if (trace.gate_mode == GateMode::kLearned) {
    for (std::size_t i = 0; i < bw; ++i) {
      dph[i] = dgate[i] * trace.gate[i] * (1.0 - trace.gate[i]);
    }
  }
  if (d_lz_scale != 0.0) {
    const double inv_bw = 1.0 / static_cast<double>(bw);
    for (std::size_t i = 0; i < bw; ++i) {
      dph[i] += d_lz_scale * (trace.sigma_ph[i] - z_label) * inv_bw;
    }
  }

  std::vector<double> dpt(arch.prop_hidden, 0.0);
  dense_backward(net.prop2, trace.pt, trace.ph_pre, trace.ph, dph, acc.d_prop2_w,
                 acc.d_prop2_b, dpt);
  // pt also feeds the mu block input tail.
  for (std::size_t j = 0; j < arch.prop_hidden; ++j) dpt[j] += d_m_in[arch.x_dim + j];

  dense_backward(net.prop1, trace.x, trace.pt_pre, trace.pt, dpt, acc.d_prop1_w,
                 acc.d_prop1_b, {});
}

LossComponents joint_loss(const CausalQuantileNet& net, const dgp::CausalDataset& ds,
                          std::span<const double> q_draws, const LossWeights& weights) {
  weights.validate();
  if (ds.n == 0) throw ValueError("joint_loss: empty dataset");
  if (q_draws.size() != ds.n) {
    throw DimensionError("joint_loss: need one q draw per unit");
  }
  LossComponents out;
  CausalTrace trace;
  for (std::size_t i = 0; i < ds.n; ++i) {
    forward_causal_into(net, ds.x.row(i), q_draws[i], GateMode::kLearned, trace);
    const double y = ds.y[i];
    const double z = static_cast<double>(ds.z[i]);
    double lz_unit = 0.0;
    for (double g : trace.sigma_ph) {
      if (g <= 1e-12 || g >= 1.0 - 1e-12) ++out.clamp_count;
      lz_unit += nn::bce_loss(g, z);
    }
    out.l_z += lz_unit / static_cast<double>(trace.sigma_ph.size());
    out.l_q += nn::pinball_loss(trace.yhat[1], y, q_draws[i]);
    const double e1 = y - trace.yhat[0];
    out.l_mse += e1 * e1;
    out.l_cross += nn::crossing_penalty_term(trace.yhat[1], y, q_draws[i]);
  }
  const double inv_n = 1.0 / static_cast<double>(ds.n);
  out.l_z *= inv_n;
  out.l_q *= inv_n;
  out.l_mse *= inv_n;
  out.l_cross *= inv_n;
  out.total = weights.w_z * out.l_z + weights.w_q * out.l_q +
              weights.w_mse * out.l_mse + weights.w_cross * out.l_cross;
  return out;
}

double crossing_penalty(std::span<const double> y, std::span<const double> y_quantile,
                        std::span<const double> q) {
  if (y.size() != y_quantile.size() || y.size() != q.size() || y.empty()) {
    throw DimensionError("crossing_penalty: mismatched or empty inputs");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    acc += nn::crossing_penalty_term(y_quantile[i], y[i], q[i]);
  }
  return acc / static_cast<double>(y.size());
}

namespace {

std::vector<nn::ParamBinding> bind_causal(CausalQuantileNet& net, CausalGradients& g) {
  std::vector<nn::ParamBinding> b;
  b.reserve(12);
  auto add = [&b](const char* name, std::vector<double>& p, const std::vector<double>& gr) {
    b.push_back({name, std::span<double>(p), std::span<const double>(gr)});
  };
  add("embed.W", net.embed_block.weights.data(), g.d_embed_w.data());
  add("embed.b", net.embed_block.bias, g.d_embed_b);
  add("prop1.W", net.prop1.weights.data(), g.d_prop1_w.data());
  add("prop1.b", net.prop1.bias, g.d_prop1_b);
  add("prop2.W", net.prop2.weights.data(), g.d_prop2_w.data());
  add("prop2.b", net.prop2.bias, g.d_prop2_b);
  add("mu.W", net.mu_block.weights.data(), g.d_mu_w.data());
  add("mu.b", net.mu_block.bias, g.d_mu_b);
  add("tau.W", net.tau_block.weights.data(), g.d_tau_w.data());
  add("tau.b", net.tau_block.bias, g.d_tau_b);
  add("out.W", net.out_head.weights.data(), g.d_out_w.data());
  add("out.b", net.out_head.bias, g.d_out_b);
  return b;
}

}  // namespace

CausalQuantileNet train_causal(const dgp::CausalDataset& ds, const CausalArch& arch,
                               const nn::TrainConfig& cfg, const LossWeights& weights,
                               TrainResultTrace* trace_out) {
  cfg.validate();
  weights.validate();
  arch.validate();
  if (ds.n == 0) throw ValueError("train_causal: empty dataset");
  if (ds.p != arch.x_dim) {
    throw DimensionError("train_causal: dataset covariate dim " + std::to_string(ds.p) +
                         " != arch x_dim " + std::to_string(arch.x_dim));
  }

  Rng init_rng(derive_seed(cfg.seed, 0));
  Rng shuffle_rng(derive_seed(cfg.seed, 1));
  Rng q_rng(derive_seed(cfg.seed, 2));

  CausalQuantileNet net = CausalQuantileNet::make(arch, init_rng);
  nn::Optimizer opt(cfg);
  CausalGradients grads = CausalGradients::zeros_like(net);
  CausalTrace trace;

  std::vector<std::size_t> order(ds.n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> q_epoch(ds.n);
  std::size_t finite_epochs = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (auto& q : q_epoch) q = q_rng.uniform();
    shuffle_rng.shuffle(order);

    LossComponents comp;
    for (std::size_t start = 0; start < ds.n; start += cfg.batch_size) {
      const std::size_t stop = std::min(ds.n, start + cfg.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(stop - start);
      grads.set_zero();
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t i = order[b];
        const double q = q_epoch[i];
        forward_causal_into(net, ds.x.row(i), q, GateMode::kLearned, trace);
        const double y = ds.y[i];
        const double z = static_cast<double>(ds.z[i]);

        double lz_unit = 0.0;
        for (double g : trace.sigma_ph) {
          if (g <= 1e-12 || g >= 1.0 - 1e-12) ++comp.clamp_count;
          lz_unit += nn::bce_loss(g, z);
        }
        comp.l_z += lz_unit / static_cast<double>(trace.sigma_ph.size());
        comp.l_q += nn::pinball_loss(trace.yhat[1], y, q);
        const double e1 = y - trace.yhat[0];
        comp.l_mse += e1 * e1;
        comp.l_cross += nn::crossing_penalty_term(trace.yhat[1], y, q);

        std::array<double, 2> d_yhat{};
        d_yhat[0] = weights.w_mse * (-2.0 * e1) * inv_batch;
        d_yhat[1] = (weights.w_q * nn::pinball_loss_grad(trace.yhat[1], y, q) +
                     weights.w_cross * nn::crossing_penalty_term_grad(trace.yhat[1], y, q)) *
                    inv_batch;
        backward_causal_accumulate(net, trace, d_yhat, weights.w_z * inv_batch, z,
                                   grads);
      }
      opt.step(bind_causal(net, grads));
    }

    const double inv_n = 1.0 / static_cast<double>(ds.n);
    comp.l_z *= inv_n;
    comp.l_q *= inv_n;
    comp.l_mse *= inv_n;
    comp.l_cross *= inv_n;
    comp.total = weights.w_z * comp.l_z + weights.w_q * comp.l_q +
                 weights.w_mse * comp.l_mse + weights.w_cross * comp.l_cross;
    if (!std::isfinite(comp.total)) {
      throw NumericError("train_causal: loss diverged at epoch " + std::to_string(epoch) +
                         " (last finite epoch " + std::to_string(finite_epochs) + ")");
    }
    ++finite_epochs;
    if (trace_out) trace_out->epochs.push_back(comp);
  }

  net.trained = true;
  if (trace_out) {
    trace_out->opt_state = opt.save_state();
    trace_out->q_rng_state = q_rng.save_state();
  }
  return net;
}

namespace {

// yhat2 with the gate forced to 1 minus forced to 0 collapses to the
// quantile row of W6 applied to the tau branch; mu and bias cancel.
double cate_draw(const CausalQuantileNet& net, std::span<const double> x, double q,
                 CausalTrace& trace) {
  const auto& arch = net.arch;
  trace.s0.resize(arch.embed_dim);
  cosine_embed_into(q, trace.s0);
  if (!arch.scalar_q_gate) {
    dense_forward(net.embed_block, trace.s0, trace.s_pre, trace.s);
  } else {
    trace.s.assign(arch.block_width, q);
  }
  dense_forward(net.tau_block, x, trace.tf_pre, trace.tf);
  const double* w = net.out_head.weights.data().data() + 1 * arch.block_width;
  double acc = 0.0;
  for (std::size_t i = 0; i < arch.block_width; ++i) {
    acc += w[i] * trace.s[i] * trace.tf[i];
  }
  return acc;
}

}  // namespace

double cate_effect_at(const CausalQuantileNet& net, std::span<const double> x, double u) {
  if (x.size() != net.arch.x_dim) {
    throw DimensionError("cate_effect_at: x length mismatch");
  }
  if (u < 0.0 || u > 1.0) throw ValueError("cate_effect_at: u outside [0,1]");
  thread_local CausalTrace trace;
  return cate_draw(net, x, u, trace);
}

CatePosterior cate_posterior(const CausalQuantileNet& net, std::span<const double> x,
                             std::size_t M, std::uint64_t seed, std::int64_t unit_id) {
  if (!net.trained) throw ValueError("cate_posterior: net is not trained");
  if (M == 0) throw ValueError("cate_posterior: M must be >= 1");
  if (x.size() != net.arch.x_dim) {
    throw DimensionError("cate_posterior: x length mismatch");
  }
  CatePosterior post;
  post.unit_id = unit_id;
  post.draws.resize(M);
  Rng rng(seed);
  CausalTrace trace;
  for (std::size_t m = 0; m < M; ++m) {
    post.draws[m] = cate_draw(net, x, rng.uniform(), trace);
  }
  return post;
}

double ate_lorenz(const CausalQuantileNet& net, const dgp::CausalDataset& ds,
                  std::size_t grid_size) {
  if (!net.trained) throw ValueError("ate_lorenz: net is not trained");
  if (grid_size == 0) throw ValueError("ate_lorenz: grid_size must be >= 1");
  if (ds.n == 0) throw ValueError("ate_lorenz: empty dataset");
  if (ds.p != net.arch.x_dim) throw DimensionError("ate_lorenz: covariate dim mismatch");

  const double inv_grid = 1.0 / static_cast<double>(grid_size);
  CausalTrace trace;
  double total = 0.0;
  for (std::size_t i = 0; i < ds.n; ++i) {
    const auto x = ds.x.row(i);
    double unit_acc = 0.0;
    for (std::size_t g = 1; g <= grid_size; ++g) {
      const double u = (static_cast<double>(g) - 0.5) * inv_grid;
      unit_acc += cate_draw(net, x, u, trace);
    }
    total += unit_acc * inv_grid;
  }
  return total / static_cast<double>(ds.n);
}

std::pair<double, double> credible_interval(const CatePosterior& posterior, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ValueError("credible_interval: level must be in (0,1)");
  }
  if (posterior.draws.size() < 100) {
    throw ValueError("credible_interval: need at least 100 draws");
  }
  const std::vector<double> sorted = stats::sorted_copy(posterior.draws);
  const double alpha = 1.0 - level;
  const double lo = stats::nearest_rank_quantile(sorted, alpha / 2.0);
  const double hi = stats::nearest_rank_quantile(sorted, 1.0 - alpha / 2.0);
  return {lo, hi};
}

namespace {

void save_dense(Checkpoint& ckpt, const std::string& prefix, const DenseLayer& layer) {
  ckpt.put_int(prefix + "/in", static_cast<std::int64_t>(layer.in_dim()));
  ckpt.put_int(prefix + "/out", static_cast<std::int64_t>(layer.out_dim()));
  ckpt.put_string(prefix + "/act", nn::activation_name(layer.activation));
  ckpt.put_doubles(prefix + "/W", layer.weights.data());
  ckpt.put_doubles(prefix + "/b", layer.bias);
}

DenseLayer load_dense(const Checkpoint& ckpt, const std::string& prefix) {
  const auto in = static_cast<std::size_t>(ckpt.int_value(prefix + "/in"));
  const auto out = static_cast<std::size_t>(ckpt.int_value(prefix + "/out"));
  DenseLayer layer(in, out, nn::activation_from_name(ckpt.string_value(prefix + "/act")));
  const auto& w = ckpt.doubles(prefix + "/W");
  const auto& b = ckpt.doubles(prefix + "/b");
  if (w.size() != in * out || b.size() != out) {
    throw IoError("checkpoint dense layer size mismatch: " + prefix);
  }
  layer.weights.data() = w;
  layer.bias = b;
  return layer;
}

}  // namespace

void save_causal_net(Checkpoint& ckpt, const CausalQuantileNet& net) {
  ckpt.put_string("model/kind", "causal_net");
  ckpt.put_int("arch/x_dim", static_cast<std::int64_t>(net.arch.x_dim));
  ckpt.put_int("arch/embed_dim", static_cast<std::int64_t>(net.arch.embed_dim));
  ckpt.put_int("arch/prop_hidden", static_cast<std::int64_t>(net.arch.prop_hidden));
  ckpt.put_int("arch/block_width", static_cast<std::int64_t>(net.arch.block_width));
  ckpt.put_string("arch/activation", nn::activation_name(net.arch.hidden_activation));
  ckpt.put_int("arch/scalar_q_gate", net.arch.scalar_q_gate ? 1 : 0);
  ckpt.put_int("model/trained", net.trained ? 1 : 0);
  save_dense(ckpt, "embed", net.embed_block);
  save_dense(ckpt, "prop1", net.prop1);
  save_dense(ckpt, "prop2", net.prop2);
  save_dense(ckpt, "mu", net.mu_block);
  save_dense(ckpt, "tau", net.tau_block);
  save_dense(ckpt, "out", net.out_head);
}

CausalQuantileNet load_causal_net(const Checkpoint& ckpt) {
  if (ckpt.string_value("model/kind") != "causal_net") {
    throw IoError("checkpoint does not hold a causal net");
  }
  CausalQuantileNet net;
  net.arch.x_dim = static_cast<std::size_t>(ckpt.int_value("arch/x_dim"));
  net.arch.embed_dim = static_cast<std::size_t>(ckpt.int_value("arch/embed_dim"));
  net.arch.prop_hidden = static_cast<std::size_t>(ckpt.int_value("arch/prop_hidden"));
  net.arch.block_width = static_cast<std::size_t>(ckpt.int_value("arch/block_width"));
  net.arch.hidden_activation =
      nn::activation_from_name(ckpt.string_value("arch/activation"));
  net.arch.scalar_q_gate = ckpt.int_value("arch/scalar_q_gate") != 0;
  net.trained = ckpt.int_value("model/trained") != 0;
  net.embed_block = load_dense(ckpt, "embed");
  net.prop1 = load_dense(ckpt, "prop1");
  net.prop2 = load_dense(ckpt, "prop2");
  net.mu_block = load_dense(ckpt, "mu");
  net.tau_block = load_dense(ckpt, "tau");
  net.out_head = load_dense(ckpt, "out");
  net.validate();
  return net;
}

}  // namespace genbayes::causal
