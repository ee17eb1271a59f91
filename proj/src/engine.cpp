#include "genbayes/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "genbayes/csv.hpp"
#include "genbayes/embedding.hpp"
#include "genbayes/linalg.hpp"
#include "genbayes/losses.hpp"

namespace genbayes::engine {

std::string tau_dist_name(TauDist d) {
  return d == TauDist::kUniform ? "uniform" : "gaussian";
}

TauDist tau_dist_from_name(const std::string& name) {
  if (name == "uniform") return TauDist::kUniform;
  if (name == "gaussian") return TauDist::kGaussian;
  throw ValueError("unknown tau distribution: " + name);
}

void SimTable::save_csv(const std::string& path) const {
  std::vector<std::string> header;
  for (std::size_t j = 0; j < theta_dim(); ++j) header.push_back("theta_" + std::to_string(j + 1));
  for (std::size_t j = 0; j < y_dim(); ++j) header.push_back("y_" + std::to_string(j + 1));
  for (std::size_t j = 0; j < tau_dim(); ++j) header.push_back("tau_" + std::to_string(j + 1));
  CsvWriter w(path, header);
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t j = 0; j < theta_dim(); ++j) w.field(theta(i, j));
    for (std::size_t j = 0; j < y_dim(); ++j) w.field(y(i, j));
    for (std::size_t j = 0; j < tau_dim(); ++j) w.field(tau(i, j));
    w.end_row();
  }
  w.close();
}

SimTable SimTable::load_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  auto count_prefix = [&](const std::string& prefix) {
    std::size_t c = 0;
    while (true) {
      const std::string name = prefix + std::to_string(c + 1);
      bool found = false;
      for (const auto& h : t.header)
        if (h == name) found = true;
      if (!found) break;
      ++c;
    }
    return c;
  };
  const std::size_t k = count_prefix("theta_");
  const std::size_t n = count_prefix("y_");
  const std::size_t d = count_prefix("tau_");
  if (k == 0 || n == 0 || d == 0) {
    throw IoError("sim table csv missing theta_/y_/tau_ columns: " + path);
  }
  SimTable table;
  const std::size_t N = t.rows.size();
  table.theta = Matrix(N, k);
  table.y = Matrix(N, n);
  table.tau = Matrix(N, d);
  for (std::size_t i = 0; i < N; ++i) {
    const auto& row = t.rows[i];
    for (std::size_t j = 0; j < k; ++j)
      table.theta(i, j) = std::stod(row[t.column("theta_" + std::to_string(j + 1))]);
    for (std::size_t j = 0; j < n; ++j)
      table.y(i, j) = std::stod(row[t.column("y_" + std::to_string(j + 1))]);
    for (std::size_t j = 0; j < d; ++j)
      table.tau(i, j) = std::stod(row[t.column("tau_" + std::to_string(j + 1))]);
  }
  return table;
}

ConjugateSimulator::ConjugateSimulator(double prior_mean, double prior_sd,
                                       double like_sd, std::size_t obs_per_draw)
    : prior_mean_(prior_mean),
      prior_sd_(prior_sd),
      like_sd_(like_sd),
      obs_per_draw_(obs_per_draw) {
  if (!(prior_sd > 0.0) || !(like_sd > 0.0)) {
    throw ValueError("ConjugateSimulator: sds must be > 0");
  }
  if (obs_per_draw == 0) throw ValueError("ConjugateSimulator: obs_per_draw must be >= 1");
}

void ConjugateSimulator::simulate(Rng& rng, std::span<double> theta,
                                  std::span<double> y) const {
  theta[0] = rng.gaussian(prior_mean_, prior_sd_);
  for (auto& v : y) v = rng.gaussian(theta[0], like_sd_);
}

double ConjugateSimulator::posterior_mean(std::span<const double> y_obs) const {
  const double prior_prec = 1.0 / (prior_sd_ * prior_sd_);
  const double like_prec = 1.0 / (like_sd_ * like_sd_);
  double sum = 0.0;
  for (double v : y_obs) sum += v;
  const double m = static_cast<double>(y_obs.size());
  return (prior_prec * prior_mean_ + like_prec * sum) / (prior_prec + m * like_prec);
}

double ConjugateSimulator::posterior_variance() const {
  const double prior_prec = 1.0 / (prior_sd_ * prior_sd_);
  const double like_prec = 1.0 / (like_sd_ * like_sd_);
  return 1.0 / (prior_prec + static_cast<double>(obs_per_draw_) * like_prec);
}

SimTable build_sim_table(const Simulator& sim, std::size_t N, TauDist tau_dist,
                         std::size_t tau_dim, std::uint64_t seed) {
  if (N == 0) throw ValueError("build_sim_table: N must be >= 1");
  if (tau_dim == 0) throw ValueError("build_sim_table: tau_dim must be >= 1");

  SimTable table;
  table.tau_dist = tau_dist;
  table.theta = Matrix(N, sim.theta_dim());
  table.y = Matrix(N, sim.y_dim());
  table.tau = Matrix(N, tau_dim);

  for (std::size_t i = 0; i < N; ++i) {
    Rng row_rng(derive_seed(seed, i));
    try {
      sim.simulate(row_rng, table.theta.row(i), table.y.row(i));
    } catch (const std::exception& e) {
      throw ValueError("build_sim_table: simulator failed at row " +
                       std::to_string(i) + ": " + e.what());
    }
    auto tau_row = table.tau.row(i);
    for (auto& v : tau_row) {
      v = tau_dist == TauDist::kUniform ? row_rng.uniform() : row_rng.gaussian();
    }
  }
  return table;
}

std::vector<double> InverseMap::embed_tau(std::span<const double> tau) const {
  if (tau.size() != tau_dim) {
    throw DimensionError("InverseMap: tau length " + std::to_string(tau.size()) +
                         " != tau_dim " + std::to_string(tau_dim));
  }
  if (arch.tau_embedding == TauEmbedding::kRaw) {
    return std::vector<double>(tau.begin(), tau.end());
  }
  std::vector<double> out(tau.size() * arch.cosine_dim);
  for (std::size_t c = 0; c < tau.size(); ++c) {
    cosine_embed_into(tau[c],
                      std::span<double>(out.data() + c * arch.cosine_dim, arch.cosine_dim));
  }
  return out;
}

std::vector<double> InverseMap::predict(std::span<const double> y_obs,
                                        std::span<const double> tau) const {
  if (y_obs.size() != y_dim) {
    throw DimensionError("InverseMap: y length " + std::to_string(y_obs.size()) +
                         " != y_dim " + std::to_string(y_dim));
  }
  const std::vector<double> stat = nn::forward(summary, y_obs).output();
  std::vector<double> head_in = stat;
  const std::vector<double> emb = embed_tau(tau);
  head_in.insert(head_in.end(), emb.begin(), emb.end());
  return nn::forward(head, head_in).output();
}

namespace {

void validate_arch(const SimTable& table, const EngineArch& arch) {
  if (table.rows() == 0) throw ValueError("train_inverse_map: empty table");
  if (arch.tau_embedding == TauEmbedding::kCosine &&
      table.tau_dist != TauDist::kUniform) {
    throw ValueError("train_inverse_map: cosine embedding requires uniform taus");
  }
  if (arch.tau_embedding == TauEmbedding::kCosine && arch.cosine_dim == 0) {
    throw ValueError("train_inverse_map: cosine_dim must be >= 1");
  }
  if (arch.head_loss == HeadLoss::kPinball) {
    if (table.tau_dist != TauDist::kUniform) {
      throw ValueError("train_inverse_map: quantile head requires uniform taus");
    }
    if (table.tau_dim() != table.theta_dim()) {
      throw ValueError(
          "train_inverse_map: quantile head requires tau_dim == theta_dim (one "
          "quantile level per coordinate)");
    }
  }
}

}  // namespace

InverseMap train_inverse_map(const SimTable& table, const EngineArch& arch,
                             const nn::TrainConfig& cfg, EngineTrainDiag* diag) {
  cfg.validate();
  validate_arch(table, arch);

  const std::size_t N = table.rows();
  const std::size_t k = table.theta_dim();
  const std::size_t n = table.y_dim();
  const std::size_t d = table.tau_dim();
  const std::size_t e = arch.embedded_tau_dim(d);

  Rng init_rng(derive_seed(cfg.seed, 0));
  Rng shuffle_rng(derive_seed(cfg.seed, 1));
  Rng tau_rng(derive_seed(cfg.seed, 2));

  InverseMap map;
  map.arch = arch;
  map.tau_dist = table.tau_dist;
  map.theta_dim = k;
  map.y_dim = n;
  map.tau_dim = d;
  map.summary = make_summary_net(n, k, arch.summary_hidden, arch.summary_activation,
                                 init_rng);
  {
    std::vector<std::size_t> dims;
    dims.push_back(k + e);
    for (auto h : arch.head_hidden) dims.push_back(h);
    dims.push_back(k);
    map.head = nn::Mlp::make(dims, arch.head_activation, nn::Activation::kIdentity,
                             init_rng);
  }

  nn::Optimizer opt(cfg);
  nn::Gradients acc_summary = nn::Gradients::zeros_like(map.summary);
  nn::Gradients acc_head = nn::Gradients::zeros_like(map.head);
  nn::ForwardTrace trace_s, trace_h;
  std::vector<double> head_in(k + e);
  std::vector<double> tau_buf(d);
  std::vector<double> gout(k);

  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t visited = 0;
    for (std::size_t start = 0; start < N; start += cfg.batch_size) {
      const std::size_t stop = std::min(N, start + cfg.batch_size);
      acc_summary.set_zero();
      acc_head.set_zero();
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t row = order[b];
        if (arch.resample_tau) {
          for (auto& v : tau_buf) {
            v = table.tau_dist == TauDist::kUniform ? tau_rng.uniform()
                                                    : tau_rng.gaussian();
          }
        } else {
          const auto tr = table.tau.row(row);
          tau_buf.assign(tr.begin(), tr.end());
        }

        nn::forward_into(map.summary, table.y.row(row), trace_s);
        const auto& stat = trace_s.output();
        std::copy(stat.begin(), stat.end(), head_in.begin());
        if (arch.tau_embedding == TauEmbedding::kCosine) {
          for (std::size_t c = 0; c < d; ++c) {
            cosine_embed_into(tau_buf[c],
                              std::span<double>(head_in.data() + k + c * arch.cosine_dim,
                                                arch.cosine_dim));
          }
        } else {
          std::copy(tau_buf.begin(), tau_buf.end(), head_in.begin() + static_cast<std::ptrdiff_t>(k));
        }
        nn::forward_into(map.head, head_in, trace_h);
        const auto& pred = trace_h.output();

        double row_loss = 0.0;
        const double inv_k = 1.0 / static_cast<double>(k);
        for (std::size_t c = 0; c < k; ++c) {
          const double target = table.theta(row, c);
          if (arch.head_loss == HeadLoss::kPinball) {
            row_loss += nn::pinball_loss(pred[c], target, tau_buf[c]);
            gout[c] = nn::pinball_loss_grad(pred[c], target, tau_buf[c]) * inv_k;
          } else {
            const double err = pred[c] - target;
            row_loss += err * err;
            gout[c] = 2.0 * err * inv_k;
          }
        }
        row_loss *= inv_k;
        epoch_loss += row_loss;
        ++visited;

        nn::backward_accumulate(map.head, trace_h, gout, acc_head);
        nn::backward_accumulate(
            map.summary, trace_s,
            std::span<const double>(acc_head.d_input.data(), k), acc_summary);
      }
      const double inv_batch = 1.0 / static_cast<double>(stop - start);
      acc_summary.scale(inv_batch);
      acc_head.scale(inv_batch);
      auto bindings = nn::bind_mlp(map.summary, acc_summary, "summary");
      auto head_bindings = nn::bind_mlp(map.head, acc_head, "head");
      bindings.insert(bindings.end(), head_bindings.begin(), head_bindings.end());
      opt.step(bindings);
    }
    epoch_loss /= static_cast<double>(visited);
    if (!std::isfinite(epoch_loss)) {
      const std::size_t last_finite = map.loss_trace.size();
      throw NumericError("train_inverse_map: loss diverged at epoch " +
                         std::to_string(epoch) + " (last finite epoch " +
                         std::to_string(last_finite) + ")");
    }
    map.loss_trace.push_back(epoch_loss);
    if (diag) diag->epoch_loss.push_back(epoch_loss);
  }
  if (diag) {
    diag->opt_state = opt.save_state();
    diag->tau_rng_state = tau_rng.save_state();
  }
  return map;
}

Matrix posterior_sample(const InverseMap& map, std::span<const double> y_obs,
                        std::size_t M, std::uint64_t seed) {
  if (M == 0) throw ValueError("posterior_sample: M must be >= 1");
  if (y_obs.size() != map.y_dim) {
    throw DimensionError("posterior_sample: y_obs length " +
                         std::to_string(y_obs.size()) + " != map y_dim " +
                         std::to_string(map.y_dim));
  }
  const std::size_t k = map.theta_dim;
  const std::size_t d = map.tau_dim;
  const std::size_t e = map.arch.embedded_tau_dim(d);

  const std::vector<double> stat = nn::forward(map.summary, y_obs).output();
  std::vector<double> head_in(k + e);
  std::copy(stat.begin(), stat.end(), head_in.begin());

  Rng rng(seed);
  Matrix draws(M, k);
  std::vector<double> tau_buf(d);
  nn::ForwardTrace trace;
  for (std::size_t m = 0; m < M; ++m) {
    for (auto& v : tau_buf) {
      v = map.tau_dist == TauDist::kUniform ? rng.uniform() : rng.gaussian();
    }
    if (map.arch.tau_embedding == TauEmbedding::kCosine) {
      for (std::size_t c = 0; c < d; ++c) {
        cosine_embed_into(tau_buf[c],
                          std::span<double>(head_in.data() + k + c * map.arch.cosine_dim,
                                            map.arch.cosine_dim));
      }
    } else {
      std::copy(tau_buf.begin(), tau_buf.end(), head_in.begin() + static_cast<std::ptrdiff_t>(k));
    }
    nn::forward_into(map.head, head_in, trace);
    const auto& out = trace.output();
    for (std::size_t c = 0; c < k; ++c) draws(m, c) = out[c];
  }
  return draws;
}

std::vector<double> summary_forward(const nn::Mlp& net, std::span<const double> y) {
  return nn::forward(net, y).output();
}

nn::Mlp make_summary_net(std::size_t y_dim, std::size_t theta_dim,
                         const std::vector<std::size_t>& hidden,
                         nn::Activation activation, Rng& rng) {
  std::vector<std::size_t> dims;
  dims.push_back(y_dim);
  for (auto h : hidden) dims.push_back(h);
  dims.push_back(theta_dim);
  return nn::Mlp::make(dims, activation, nn::Activation::kIdentity, rng);
}

LinearGenerative estimate_linear_generative(const SimTable& table, std::size_t J,
                                            std::uint64_t seed) {
  const std::size_t N = table.rows();
  const std::size_t k = table.theta_dim();
  const std::size_t n = table.y_dim();
  if (N <= k + J) {
    throw ValueError("estimate_linear_generative: need N > k + J");
  }

  const std::size_t p = 1 + n + J;  // intercept, y block, noise block
  Matrix X(N, p);
  Rng rng(seed);
  for (std::size_t i = 0; i < N; ++i) {
    X(i, 0) = 1.0;
    for (std::size_t j = 0; j < n; ++j) X(i, 1 + j) = table.y(i, j);
    for (std::size_t j = 0; j < J; ++j) X(i, 1 + n + j) = rng.gaussian();
  }

  LinearGenerative out;
  out.noise_dim = J;
  out.w_coefs = Matrix(k, n);
  out.tau_coefs = Matrix(k, J);
  out.tau_coef_se = Matrix(k, J);
  out.intercept.resize(k);

  std::vector<double> theta_col(N);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < N; ++i) theta_col[i] = table.theta(i, c);
    const linalg::OlsFit fit = linalg::ols(X, theta_col);
    out.intercept[c] = fit.beta[0];
    for (std::size_t j = 0; j < n; ++j) out.w_coefs(c, j) = fit.beta[1 + j];
    const double sigma2 = fit.rss / static_cast<double>(N - p);
    for (std::size_t j = 0; j < J; ++j) {
      out.tau_coefs(c, j) = fit.beta[1 + n + j];
      out.tau_coef_se(c, j) =
          std::sqrt(sigma2 * fit.xtx_inverse(1 + n + j, 1 + n + j));
    }
  }
  return out;
}

void save_inverse_map(Checkpoint& ckpt, const InverseMap& map) {
  ckpt.put_string("model/kind", "inverse_map");
  nn::save_mlp(ckpt, "summary", map.summary);
  nn::save_mlp(ckpt, "head", map.head);
  ckpt.put_int("map/theta_dim", static_cast<std::int64_t>(map.theta_dim));
  ckpt.put_int("map/y_dim", static_cast<std::int64_t>(map.y_dim));
  ckpt.put_int("map/tau_dim", static_cast<std::int64_t>(map.tau_dim));
  ckpt.put_string("map/tau_dist", tau_dist_name(map.tau_dist));
  ckpt.put_string("map/tau_embedding",
                  map.arch.tau_embedding == TauEmbedding::kCosine ? "cosine" : "raw");
  ckpt.put_int("map/cosine_dim", static_cast<std::int64_t>(map.arch.cosine_dim));
  ckpt.put_string("map/head_loss",
                  map.arch.head_loss == HeadLoss::kPinball ? "pinball" : "l2");
  ckpt.put_doubles("map/loss_trace", map.loss_trace);
}

InverseMap load_inverse_map(const Checkpoint& ckpt) {
  if (ckpt.string_value("model/kind") != "inverse_map") {
    throw IoError("checkpoint does not hold an inverse map");
  }
  InverseMap map;
  map.summary = nn::load_mlp(ckpt, "summary");
  map.head = nn::load_mlp(ckpt, "head");
  map.theta_dim = static_cast<std::size_t>(ckpt.int_value("map/theta_dim"));
  map.y_dim = static_cast<std::size_t>(ckpt.int_value("map/y_dim"));
  map.tau_dim = static_cast<std::size_t>(ckpt.int_value("map/tau_dim"));
  map.tau_dist = tau_dist_from_name(ckpt.string_value("map/tau_dist"));
  map.arch.tau_embedding = ckpt.string_value("map/tau_embedding") == "cosine"
                               ? TauEmbedding::kCosine
                               : TauEmbedding::kRaw;
  map.arch.cosine_dim = static_cast<std::size_t>(ckpt.int_value("map/cosine_dim"));
  map.arch.head_loss = ckpt.string_value("map/head_loss") == "pinball"
                           ? HeadLoss::kPinball
                           : HeadLoss::kL2;
  map.loss_trace = ckpt.doubles("map/loss_trace");
  return map;
}

}  // namespace genbayes::engine
