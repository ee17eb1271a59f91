// genbayes: batch pipeline for the generative-Bayes workbench.
// Subcommands: generate | train | sample | evaluate | benchmark.
// Exit codes: 0 success, 2 usage error, 1 runtime failure.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <type_traits>
#include <string>
#include <vector>

#include "genbayes/benchmark.hpp"
#include "genbayes/causal.hpp"
#include "genbayes/checkpoint.hpp"
#include "genbayes/config.hpp"
#include "genbayes/csv.hpp"
#include "genbayes/dgp.hpp"
#include "genbayes/engine.hpp"
#include "genbayes/metrics.hpp"
#include "genbayes/stats.hpp"

namespace fs = std::filesystem;
using namespace genbayes;

namespace {

// ------------------------------------------------------- config merging

template <typename T>
T parse_value(const std::string& s) {
  if constexpr (std::is_same_v<T, std::string>) {
    return s;
  } else if constexpr (std::is_same_v<T, double>) {
    return std::stod(s);
  } else if constexpr (std::is_unsigned_v<T>) {
    return static_cast<T>(std::stoull(s));
  } else {
    return static_cast<T>(std::stoll(s));
  }
}

inline bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ValueError("not a bool: " + s);
}

// Registers options on a subcommand and merges a flat `key = value` config
// after parsing.  Precedence: command-line flag > config file >
// GENBAYES_SEED (seed only) > built-in default.
class ConfigBinder {
 public:
  explicit ConfigBinder(CLI::App* cmd) : cmd_(cmd) {
    cmd_->add_option("--config", config_path_, "flat key = value config file")
        ->check(CLI::ExistingFile);
  }

  template <typename T>
  CLI::Option* opt(const std::string& flag_name, T& var, const std::string& desc = "") {
    auto* o = cmd_->add_option(flag_name, var, desc);
    entries_.push_back({flag_name.substr(2), o,
                        [&var](const std::string& s) { var = parse_value<T>(s); }});
    return o;
  }

  CLI::Option* flag(const std::string& flag_name, bool& var, const std::string& desc = "") {
    auto* o = cmd_->add_flag(flag_name, var, desc);
    entries_.push_back({flag_name.substr(2), o,
                        [&var](const std::string& s) { var = parse_bool(s); }});
    return o;
  }

  // Call once after CLI parsing, before running the command.
  void finalize(std::uint64_t* seed_var) const {
    bool seed_from_config = false;
    if (!config_path_.empty()) {
      const KeyValueConfig kv = KeyValueConfig::load(config_path_);
      for (const auto& e : entries_) {
        if (e.option->count() == 0 && kv.has(e.key)) {
          e.apply(kv.get_string(e.key));
          if (e.key == "seed") seed_from_config = true;
        }
      }
    }
    if (seed_var != nullptr && !seed_from_config) {
      const auto* seed_opt = cmd_->get_option("--seed");
      if (seed_opt->count() == 0) {
        if (const char* env = std::getenv("GENBAYES_SEED")) {
          *seed_var = parse_value<std::uint64_t>(env);
        }
      }
    }
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* option;
    std::function<void(const std::string&)> apply;
  };
  CLI::App* cmd_;
  std::string config_path_;
  std::vector<Entry> entries_;
};


std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);
}

void write_histogram_csv(const std::string& path, std::span<const double> values,
                         std::size_t bins) {
  const stats::Histogram h = stats::make_histogram(values, bins);
  CsvWriter w(path, {"bin_lo", "bin_hi", "count"});
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    w.field(h.edges[b]);
    w.field(h.edges[b + 1]);
    w.field(h.counts[b]);
    w.end_row();
  }
  w.close();
}

std::vector<std::size_t> parse_unit_list(const std::string& csv, std::size_t n) {
  std::vector<std::size_t> units;
  if (csv.empty()) {
    units.resize(n);
    for (std::size_t i = 0; i < n; ++i) units[i] = i;
    return units;
  }
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string tok =
        csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const std::size_t u = static_cast<std::size_t>(std::stoull(tok));
    if (u >= n) throw ValueError("unit id " + tok + " out of range (n = " + std::to_string(n) + ")");
    units.push_back(u);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return units;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string tok =
        csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    values.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return values;
}

nn::TrainConfig make_train_config(double lr, std::size_t batch, std::size_t epochs,
                                  const std::string& optimizer, double clip,
                                  std::uint64_t seed) {
  nn::TrainConfig cfg;
  cfg.learning_rate = lr;
  cfg.batch_size = batch;
  cfg.epochs = epochs;
  if (optimizer == "sgd") {
    cfg.optimizer = nn::OptKind::kSgd;
  } else if (optimizer == "adam") {
    cfg.optimizer = nn::OptKind::kAdam;
  } else {
    throw ValueError("unknown optimizer: " + optimizer);
  }
  if (clip > 0.0) cfg.gradient_clip = clip;
  cfg.seed = seed;
  return cfg;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::size_t n = 1000;
  double sigma = 1.0;
  std::uint64_t seed = 1;
  std::size_t p = 3;
  bool raw_tau = false;
  std::size_t bins = 30;
  std::string out = ".";
};

int cmd_generate(const GenerateArgs& a) {
  ensure_out_dir(a.out);
  dgp::GenCausalOptions opts;
  opts.p = a.p;
  opts.use_raw_tau = a.raw_tau;
  const dgp::CausalDataset ds = dgp::gen_causal(a.n, a.sigma, a.seed, opts);

  dgp::write_dataset_csv(ds, join_path(a.out, "dataset_full.csv"), true);
  dgp::write_dataset_csv(ds.observational_view(), join_path(a.out, "dataset_obs.csv"), false);
  write_histogram_csv(join_path(a.out, "hist_y.csv"), ds.y, a.bins);
  write_histogram_csv(join_path(a.out, "hist_mu.csv"), ds.mu_true, a.bins);
  write_histogram_csv(join_path(a.out, "hist_tau.csv"), ds.tau_true, a.bins);

  KeyValueConfig kv;
  kv.set("command", "generate");
  kv.set("n", static_cast<std::int64_t>(a.n));
  kv.set("sigma", a.sigma);
  kv.set("seed", a.seed);
  kv.set("p", static_cast<std::int64_t>(a.p));
  kv.set("raw-tau", a.raw_tau);
  kv.set("bins", static_cast<std::int64_t>(a.bins));
  kv.save(join_path(a.out, "generate_config.txt"));

  double zbar = 0.0;
  for (int z : ds.z) zbar += z;
  zbar /= static_cast<double>(ds.n);
  std::printf("n = %zu\n", ds.n);
  std::printf("mean(y) = %.6f  sd(y) = %.6f\n", stats::mean(ds.y), stats::stddev(ds.y));
  std::printf("mean(z) = %.6f\n", zbar);
  std::printf("tau scale: mean = %.6f  sd = %.6f\n", ds.tau_mean, ds.tau_sd);
  return 0;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
  std::string mode = "causal";
  std::string data;
  std::size_t epochs = 300;
  std::size_t batch = 100;
  double lr = 1e-3;
  std::string optimizer = "adam";
  double clip = 0.0;
  std::uint64_t seed = 1;
  std::string out = ".";
  // causal arch + loss weights
  std::size_t embed_dim = 32;
  std::size_t prop_hidden = 8;
  std::size_t block_width = 32;
  std::string activation = "relu";
  bool scalar_q = false;
  double w_z = 1.0, w_q = 1.0, w_mse = 1.0, w_cross = 1.0;
  // engine
  std::string model = "conjugate";
  std::size_t num_sims = 100000;
  double prior_mean = 0.0, prior_sd = 1.0, like_sd = 1.0;
  std::size_t obs_per_draw = 1;
  std::string tau_dist = "uniform";
  std::size_t tau_dim = 1;
  std::string embedding = "cosine";
  std::size_t cosine_dim = 32;
  std::string head_loss = "pinball";
  bool fixed_tau = false;
};

void save_train_config(const TrainArgs& a) {
  KeyValueConfig kv;
  kv.set("command", "train");
  kv.set("mode", a.mode);
  kv.set("epochs", static_cast<std::int64_t>(a.epochs));
  kv.set("batch", static_cast<std::int64_t>(a.batch));
  kv.set("lr", a.lr);
  kv.set("optimizer", a.optimizer);
  kv.set("clip", a.clip);
  kv.set("seed", a.seed);
  if (a.mode == "causal") {
    kv.set("data", a.data);
    kv.set("embed-dim", static_cast<std::int64_t>(a.embed_dim));
    kv.set("prop-hidden", static_cast<std::int64_t>(a.prop_hidden));
    kv.set("block-width", static_cast<std::int64_t>(a.block_width));
    kv.set("activation", a.activation);
    kv.set("scalar-q", a.scalar_q);
    kv.set("w-z", a.w_z);
    kv.set("w-q", a.w_q);
    kv.set("w-mse", a.w_mse);
    kv.set("w-cross", a.w_cross);
  } else {
    kv.set("model", a.model);
    kv.set("num-sims", static_cast<std::int64_t>(a.num_sims));
    kv.set("prior-mean", a.prior_mean);
    kv.set("prior-sd", a.prior_sd);
    kv.set("like-sd", a.like_sd);
    kv.set("obs-per-draw", static_cast<std::int64_t>(a.obs_per_draw));
    kv.set("tau-dist", a.tau_dist);
    kv.set("tau-dim", static_cast<std::int64_t>(a.tau_dim));
    kv.set("embedding", a.embedding);
    kv.set("cosine-dim", static_cast<std::int64_t>(a.cosine_dim));
    kv.set("head-loss", a.head_loss);
    kv.set("fixed-tau", a.fixed_tau);
  }
  kv.save(join_path(a.out, "train_config.txt"));
}

void write_causal_trace_csv(const std::string& path,
                            const std::vector<causal::LossComponents>& epochs) {
  CsvWriter w(path, {"epoch", "total", "l_z", "l_q", "l_mse", "l_cross", "clamp_count"});
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    w.field(e);
    w.field(epochs[e].total);
    w.field(epochs[e].l_z);
    w.field(epochs[e].l_q);
    w.field(epochs[e].l_mse);
    w.field(epochs[e].l_cross);
    w.field(epochs[e].clamp_count);
    w.end_row();
  }
  w.close();
}

int cmd_train(const TrainArgs& a) {
  ensure_out_dir(a.out);
  save_train_config(a);

  if (a.mode == "causal") {
    if (a.data.empty()) throw ValueError("train --mode causal requires --data");
    const dgp::CausalDataset ds = dgp::read_dataset_csv(a.data).observational_view();
    causal::CausalArch arch;
    arch.x_dim = ds.p;
    arch.embed_dim = a.embed_dim;
    arch.prop_hidden = a.prop_hidden;
    arch.block_width = a.block_width;
    arch.hidden_activation = nn::activation_from_name(a.activation);
    arch.scalar_q_gate = a.scalar_q;
    causal::LossWeights weights{a.w_z, a.w_q, a.w_mse, a.w_cross};
    const nn::TrainConfig cfg =
        make_train_config(a.lr, a.batch, a.epochs, a.optimizer, a.clip, a.seed);

    causal::TrainResultTrace trace;
    try {
      const causal::CausalQuantileNet net =
          causal::train_causal(ds, arch, cfg, weights, &trace);
      write_causal_trace_csv(join_path(a.out, "loss_trace.csv"), trace.epochs);
      Checkpoint ckpt;
      causal::save_causal_net(ckpt, net);
      nn::save_optimizer_state(ckpt, "opt", trace.opt_state);
      nn::save_rng_state(ckpt, "rng/q", trace.q_rng_state);
      ckpt.save(join_path(a.out, "model.ckpt"));
    } catch (const NumericError&) {
      // keep the partial trace on divergence, then fail
      write_causal_trace_csv(join_path(a.out, "loss_trace.csv"), trace.epochs);
      throw;
    }
    const double final_loss = trace.epochs.empty() ? 0.0 : trace.epochs.back().total;
    std::printf("trained causal net: %zu epochs, final loss %.6f\n", trace.epochs.size(),
                final_loss);
    return 0;
  }

  if (a.mode != "engine") throw ValueError("unknown train mode: " + a.mode);
  if (a.model != "conjugate") throw ValueError("unknown engine model: " + a.model);

  const engine::ConjugateSimulator sim(a.prior_mean, a.prior_sd, a.like_sd, a.obs_per_draw);
  const engine::TauDist tau_dist = engine::tau_dist_from_name(a.tau_dist);
  const engine::SimTable table =
      engine::build_sim_table(sim, a.num_sims, tau_dist, a.tau_dim, derive_seed(a.seed, 0));

  engine::EngineArch arch;
  arch.tau_embedding = a.embedding == "cosine" ? engine::TauEmbedding::kCosine
                                               : engine::TauEmbedding::kRaw;
  arch.cosine_dim = a.cosine_dim;
  arch.head_loss = a.head_loss == "l2" ? engine::HeadLoss::kL2 : engine::HeadLoss::kPinball;
  arch.resample_tau = !a.fixed_tau;
  nn::TrainConfig cfg =
      make_train_config(a.lr, a.batch, a.epochs, a.optimizer, a.clip, derive_seed(a.seed, 1));

  engine::EngineTrainDiag diag;
  try {
    const engine::InverseMap map = engine::train_inverse_map(table, arch, cfg, &diag);
    CsvWriter w(join_path(a.out, "loss_trace.csv"), {"epoch", "loss"});
    for (std::size_t e = 0; e < diag.epoch_loss.size(); ++e) {
      w.field(e);
      w.field(diag.epoch_loss[e]);
      w.end_row();
    }
    w.close();
    Checkpoint ckpt;
    engine::save_inverse_map(ckpt, map);
    nn::save_optimizer_state(ckpt, "opt", diag.opt_state);
    nn::save_rng_state(ckpt, "rng/tau", diag.tau_rng_state);
    // conjugate-model metadata so `sample` can report context
    ckpt.put_doubles("conjugate/params",
                     std::vector<double>{a.prior_mean, a.prior_sd, a.like_sd});
    ckpt.save(join_path(a.out, "model.ckpt"));
  } catch (const NumericError&) {
    CsvWriter w(join_path(a.out, "loss_trace.csv"), {"epoch", "loss"});
    for (std::size_t e = 0; e < diag.epoch_loss.size(); ++e) {
      w.field(e);
      w.field(diag.epoch_loss[e]);
      w.end_row();
    }
    w.close();
    throw;
  }
  std::printf("trained inverse map: %zu epochs, final loss %.6f\n", diag.epoch_loss.size(),
              diag.epoch_loss.empty() ? 0.0 : diag.epoch_loss.back());
  return 0;
}

// ------------------------------------------------------------------ sample

struct SampleArgs {
  std::string checkpoint;
  std::string data;
  std::string units;   // comma list; empty = all
  std::string y_obs;   // engine mode observation vector
  std::size_t M = 1000;
  std::uint64_t seed = 1;
  std::string out = ".";
};

int cmd_sample(const SampleArgs& a) {
  ensure_out_dir(a.out);
  const Checkpoint ckpt = Checkpoint::load(a.checkpoint);
  const std::string kind = ckpt.string_value("model/kind");

  KeyValueConfig kv;
  kv.set("command", "sample");
  kv.set("checkpoint", a.checkpoint);
  kv.set("M", static_cast<std::int64_t>(a.M));
  kv.set("seed", a.seed);

  if (kind == "causal_net") {
    if (a.data.empty()) throw ValueError("sample with a causal checkpoint requires --data");
    kv.set("data", a.data);
    kv.set("units", a.units);
    kv.save(join_path(a.out, "sample_config.txt"));
    const causal::CausalQuantileNet net = causal::load_causal_net(ckpt);
    const dgp::CausalDataset ds = dgp::read_dataset_csv(a.data);
    const std::vector<std::size_t> units = parse_unit_list(a.units, ds.n);
    CsvWriter w(join_path(a.out, "samples.csv"), {"unit_id", "draw_id", "tau_draw"});
    for (std::size_t u : units) {
      const causal::CatePosterior post = causal::cate_posterior(
          net, ds.x.row(u), a.M, derive_seed(a.seed, u), static_cast<std::int64_t>(u));
      for (std::size_t m = 0; m < post.draws.size(); ++m) {
        w.field(u);
        w.field(m);
        w.field(post.draws[m]);
        w.end_row();
      }
    }
    w.close();
    std::printf("wrote %zu x %zu draws\n", units.size(), a.M);
    return 0;
  }

  if (kind != "inverse_map") throw ValueError("unknown checkpoint kind: " + kind);
  if (a.y_obs.empty()) throw ValueError("sample with an engine checkpoint requires --y-obs");
  kv.set("y-obs", a.y_obs);
  kv.save(join_path(a.out, "sample_config.txt"));
  const engine::InverseMap map = engine::load_inverse_map(ckpt);
  const std::vector<double> y = parse_double_list(a.y_obs);
  const Matrix draws = engine::posterior_sample(map, y, a.M, a.seed);
  std::vector<std::string> header = {"draw_id"};
  for (std::size_t c = 0; c < draws.cols(); ++c) {
    header.push_back("theta_" + std::to_string(c + 1));
  }
  CsvWriter w(join_path(a.out, "samples.csv"), header);
  for (std::size_t m = 0; m < draws.rows(); ++m) {
    w.field(m);
    for (std::size_t c = 0; c < draws.cols(); ++c) w.field(draws(m, c));
    w.end_row();
  }
  w.close();
  std::printf("wrote %zu posterior draws\n", a.M);
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string checkpoint;
  std::string data;
  std::size_t M = 512;
  double level = 0.95;
  std::size_t grid = 99;
  std::size_t bins = 30;
  std::uint64_t seed = 1;
  std::string out = ".";
};

int cmd_evaluate(const EvaluateArgs& a) {
  ensure_out_dir(a.out);
  const Checkpoint ckpt = Checkpoint::load(a.checkpoint);
  const causal::CausalQuantileNet net = causal::load_causal_net(ckpt);
  const dgp::CausalDataset ds = dgp::read_dataset_csv(a.data);
  if (!ds.has_ground_truth()) {
    throw ValueError("evaluate requires the full dataset view (ground-truth columns)");
  }

  KeyValueConfig kv;
  kv.set("command", "evaluate");
  kv.set("checkpoint", a.checkpoint);
  kv.set("data", a.data);
  kv.set("M", static_cast<std::int64_t>(a.M));
  kv.set("level", a.level);
  kv.set("grid", static_cast<std::int64_t>(a.grid));
  kv.set("bins", static_cast<std::int64_t>(a.bins));
  kv.set("seed", a.seed);
  kv.save(join_path(a.out, "evaluate_config.txt"));

  metrics::EvaluateOptions opts;
  opts.lorenz_grid = a.grid;
  std::vector<metrics::UnitPrediction> per_unit;
  const metrics::MetricsReport report =
      metrics::evaluate(ds, net, a.M, a.level, a.seed, opts, &per_unit);

  metrics::write_report_file(report, join_path(a.out, "report.txt"));
  {
    CsvWriter w(join_path(a.out, "report_row.csv"), metrics::report_csv_header());
    for (const auto& f : metrics::report_csv_row(report)) w.field(f);
    w.end_row();
    w.close();
  }
  {
    CsvWriter w(join_path(a.out, "predictions.csv"),
                {"unit_id", "y_hat_mean", "y_hat_q50", "pi_hat", "cate_mean", "ci_lo",
                 "ci_hi"});
    for (std::size_t i = 0; i < per_unit.size(); ++i) {
      const auto& p = per_unit[i];
      w.field(i);
      w.field(p.y_hat_mean);
      w.field(p.y_hat_q50);
      w.field(p.pi_hat);
      w.field(p.cate_mean);
      w.field(p.ci_lo);
      w.field(p.ci_hi);
      w.end_row();
    }
    w.close();
  }
  {
    std::vector<double> pi_hat(per_unit.size());
    for (std::size_t i = 0; i < per_unit.size(); ++i) pi_hat[i] = per_unit[i].pi_hat;
    write_histogram_csv(join_path(a.out, "pihat_hist.csv"), pi_hat, a.bins);
  }
  std::printf("ate_est = %.6f (true %.6f)  cate_rmse = %.6f  coverage = %.3f\n",
              report.ate_est, report.ate_true, report.cate_rmse, report.coverage);
  return 0;
}

// --------------------------------------------------------------- benchmark

struct BenchmarkArgs {
  std::size_t replications = 20;
  std::size_t n = 1000;
  double sigma = 1.0;
  std::uint64_t seed = 1;
  std::size_t epochs = 300;
  std::size_t batch = 100;
  double lr = 1e-3;
  double w_z = 1.0, w_q = 1.0, w_mse = 1.0, w_cross = 1.0;
  std::size_t M = 512;
  double level = 0.95;
  std::size_t jobs = 1;
  std::string out = ".";
};

int cmd_benchmark(const BenchmarkArgs& a) {
  ensure_out_dir(a.out);
  KeyValueConfig kv;
  kv.set("command", "benchmark");
  kv.set("replications", static_cast<std::int64_t>(a.replications));
  kv.set("n", static_cast<std::int64_t>(a.n));
  kv.set("sigma", a.sigma);
  kv.set("seed", a.seed);
  kv.set("epochs", static_cast<std::int64_t>(a.epochs));
  kv.set("batch", static_cast<std::int64_t>(a.batch));
  kv.set("lr", a.lr);
  kv.set("w-z", a.w_z);
  kv.set("w-q", a.w_q);
  kv.set("w-mse", a.w_mse);
  kv.set("w-cross", a.w_cross);
  kv.set("M", static_cast<std::int64_t>(a.M));
  kv.set("level", a.level);
  kv.save(join_path(a.out, "benchmark_config.txt"));

  bench::BenchmarkConfig cfg;
  cfg.replications = a.replications;
  cfg.n = a.n;
  cfg.sigma = a.sigma;
  cfg.seed = a.seed;
  cfg.train.epochs = a.epochs;
  cfg.train.batch_size = a.batch;
  cfg.train.learning_rate = a.lr;
  cfg.weights = causal::LossWeights{a.w_z, a.w_q, a.w_mse, a.w_cross};
  cfg.M = a.M;
  cfg.level = a.level;
  cfg.jobs = a.jobs;

  const bench::BenchmarkResult result = bench::run_benchmark(cfg);

  {
    CsvWriter w(join_path(a.out, "benchmark_rows.csv"), bench::benchmark_csv_header());
    for (const auto& row : result.rows) {
      for (const auto& f : bench::benchmark_csv_row(row)) w.field(f);
      w.end_row();
    }
    w.close();
  }
  {
    CsvWriter w(join_path(a.out, "benchmark_aggregate.csv"), {"metric", "mean", "sd"});
    for (const auto& [name, m] : result.mean) {
      w.field(name);
      w.field(m);
      w.field(result.sd.at(name));
      w.end_row();
    }
    w.close();
  }

  std::size_t failed = 0;
  for (const auto& row : result.rows) {
    if (!row.ok) {
      ++failed;
      std::fprintf(stderr, "replication %zu failed: %s\n", row.rep, row.error.c_str());
    }
  }
  if (result.mean.count("ate_abs_err")) {
    std::printf("replications = %zu  mean |ate err| = %.4f  mean cate_rmse = %.4f  "
                "mean coverage = %.3f\n",
                a.replications, result.mean.at("ate_abs_err"),
                result.mean.at("cate_rmse"), result.mean.at("coverage"));
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generative-Bayes workbench: simulate, train, sample, evaluate"};
  app.require_subcommand(1);

  GenerateArgs gen;
  TrainArgs train;
  SampleArgs sample;
  EvaluateArgs eval;
  BenchmarkArgs bench_args;

  auto* g = app.add_subcommand("generate", "Generate a synthetic causal dataset");
  ConfigBinder gb(g);
  gb.opt("--n", gen.n, "sample size")->check(CLI::PositiveNumber);
  gb.opt("--sigma", gen.sigma, "outcome noise sd")->check(CLI::NonNegativeNumber);
  gb.opt("--seed", gen.seed, "rng seed");
  gb.opt("--p", gen.p, "covariate dimension (>= 3)")->check(CLI::Range(3, 1000000));
  gb.flag("--raw-tau", gen.raw_tau, "generate y with the raw-scale effect");
  gb.opt("--bins", gen.bins, "histogram bins")->check(CLI::PositiveNumber);
  gb.opt("--out", gen.out, "output directory");

  auto* t = app.add_subcommand("train", "Train a model");
  ConfigBinder tb(t);
  tb.opt("--mode", train.mode, "causal | engine");
  tb.opt("--data", train.data, "dataset csv (causal mode)");
  tb.opt("--epochs", train.epochs)->check(CLI::PositiveNumber);
  tb.opt("--batch", train.batch)->check(CLI::PositiveNumber);
  tb.opt("--lr", train.lr)->check(CLI::PositiveNumber);
  tb.opt("--optimizer", train.optimizer, "adam | sgd");
  tb.opt("--clip", train.clip, "gradient clip (0 = off)")->check(CLI::NonNegativeNumber);
  tb.opt("--seed", train.seed);
  tb.opt("--out", train.out, "output directory");
  tb.opt("--embed-dim", train.embed_dim)->check(CLI::PositiveNumber);
  tb.opt("--prop-hidden", train.prop_hidden)->check(CLI::PositiveNumber);
  tb.opt("--block-width", train.block_width)->check(CLI::PositiveNumber);
  tb.opt("--activation", train.activation, "relu | tanh | sigmoid | identity");
  tb.flag("--scalar-q", train.scalar_q, "multiply branches by scalar q");
  tb.opt("--w-z", train.w_z)->check(CLI::NonNegativeNumber);
  tb.opt("--w-q", train.w_q)->check(CLI::NonNegativeNumber);
  tb.opt("--w-mse", train.w_mse)->check(CLI::NonNegativeNumber);
  tb.opt("--w-cross", train.w_cross)->check(CLI::NonNegativeNumber);
  tb.opt("--model", train.model, "engine model (conjugate)");
  tb.opt("--num-sims", train.num_sims)->check(CLI::PositiveNumber);
  tb.opt("--prior-mean", train.prior_mean);
  tb.opt("--prior-sd", train.prior_sd)->check(CLI::PositiveNumber);
  tb.opt("--like-sd", train.like_sd)->check(CLI::PositiveNumber);
  tb.opt("--obs-per-draw", train.obs_per_draw)->check(CLI::PositiveNumber);
  tb.opt("--tau-dist", train.tau_dist, "uniform | gaussian");
  tb.opt("--tau-dim", train.tau_dim)->check(CLI::PositiveNumber);
  tb.opt("--embedding", train.embedding, "cosine | raw");
  tb.opt("--cosine-dim", train.cosine_dim)->check(CLI::PositiveNumber);
  tb.opt("--head-loss", train.head_loss, "pinball | l2");
  tb.flag("--fixed-tau", train.fixed_tau, "replay table taus instead of resampling");

  auto* s = app.add_subcommand("sample", "Draw posterior samples from a checkpoint");
  ConfigBinder sb(s);
  sb.opt("--checkpoint", sample.checkpoint)->required();
  sb.opt("--data", sample.data, "dataset csv (causal checkpoints)");
  sb.opt("--units", sample.units, "comma list of unit ids (default: all)");
  sb.opt("--y-obs", sample.y_obs, "comma list observation (engine checkpoints)");
  sb.opt("--M", sample.M, "draws per unit")->check(CLI::PositiveNumber);
  sb.opt("--seed", sample.seed);
  sb.opt("--out", sample.out, "output directory");

  auto* e = app.add_subcommand("evaluate", "Evaluate a causal checkpoint against ground truth");
  ConfigBinder eb(e);
  eb.opt("--checkpoint", eval.checkpoint)->required();
  eb.opt("--data", eval.data, "full dataset csv")->required();
  eb.opt("--M", eval.M, "posterior draws per unit")->check(CLI::Range(100, 100000000));
  eb.opt("--level", eval.level, "credible level")->check(CLI::Range(1e-6, 1.0 - 1e-6));
  eb.opt("--grid", eval.grid, "Lorenz quadrature grid")->check(CLI::PositiveNumber);
  eb.opt("--bins", eval.bins, "histogram bins")->check(CLI::PositiveNumber);
  eb.opt("--seed", eval.seed);
  eb.opt("--out", eval.out, "output directory");

  auto* b = app.add_subcommand("benchmark", "Replicated generate/train/evaluate runs");
  ConfigBinder bb(b);
  bb.opt("--replications", bench_args.replications)->check(CLI::PositiveNumber);
  bb.opt("--n", bench_args.n)->check(CLI::PositiveNumber);
  bb.opt("--sigma", bench_args.sigma)->check(CLI::NonNegativeNumber);
  bb.opt("--seed", bench_args.seed);
  bb.opt("--epochs", bench_args.epochs)->check(CLI::PositiveNumber);
  bb.opt("--batch", bench_args.batch)->check(CLI::PositiveNumber);
  bb.opt("--lr", bench_args.lr)->check(CLI::PositiveNumber);
  bb.opt("--w-z", bench_args.w_z)->check(CLI::NonNegativeNumber);
  bb.opt("--w-q", bench_args.w_q)->check(CLI::NonNegativeNumber);
  bb.opt("--w-mse", bench_args.w_mse)->check(CLI::NonNegativeNumber);
  bb.opt("--w-cross", bench_args.w_cross)->check(CLI::NonNegativeNumber);
  bb.opt("--M", bench_args.M)->check(CLI::Range(100, 100000000));
  bb.opt("--level", bench_args.level)->check(CLI::Range(1e-6, 1.0 - 1e-6));
  bb.opt("--jobs", bench_args.jobs, "parallel replication workers")->check(CLI::PositiveNumber);
  bb.opt("--out", bench_args.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (g->parsed()) {
      gb.finalize(&gen.seed);
      return cmd_generate(gen);
    }
    if (t->parsed()) {
      tb.finalize(&train.seed);
      return cmd_train(train);
    }
    if (s->parsed()) {
      sb.finalize(&sample.seed);
      return cmd_sample(sample);
    }
    if (e->parsed()) {
      eb.finalize(&eval.seed);
      return cmd_evaluate(eval);
    }
    if (b->parsed()) {
      bb.finalize(&bench_args.seed);
      return cmd_benchmark(bench_args);
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
