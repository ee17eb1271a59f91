#include "genbayes/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "genbayes/csv.hpp"
#include "genbayes/dgp.hpp"
#include "genbayes/stats.hpp"

namespace genbayes::bench {

ReplicationRow run_replication(const BenchmarkConfig& cfg, std::size_t rep) {
  ReplicationRow row;
  row.rep = rep;
  row.seed = derive_seed(cfg.seed, rep);
  try {
    dgp::GenCausalOptions gen_opts;
    gen_opts.p = cfg.arch.x_dim;
    const dgp::CausalDataset ds = dgp::gen_causal(cfg.n, cfg.sigma, row.seed, gen_opts);
    const dgp::CausalDataset obs = ds.observational_view();

    nn::TrainConfig train = cfg.train;
    train.seed = derive_seed(row.seed, 1);
    const causal::CausalQuantileNet net =
        causal::train_causal(obs, cfg.arch, train, cfg.weights);

    std::vector<metrics::UnitPrediction> per_unit;
    row.report = metrics::evaluate(ds, net, cfg.M, cfg.level, derive_seed(row.seed, 2),
                                   cfg.eval, &per_unit);
    std::vector<double> cate_means(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) cate_means[i] = per_unit[i].cate_mean;
    row.cate_corr = stats::correlation(cate_means, ds.tau_true);
    row.net_beats_baseline = row.report.cate_rmse < row.report.baseline_cate_rmse;
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
  if (cfg.replications == 0) throw ValueError("run_benchmark: replications must be >= 1");
  BenchmarkResult result;
  result.rows.resize(cfg.replications);

  const std::size_t jobs = std::max<std::size_t>(1, cfg.jobs);
  if (jobs == 1) {
    for (std::size_t r = 0; r < cfg.replications; ++r) {
      result.rows[r] = run_replication(cfg, r);
    }
  } else {
    std::size_t next = 0;
    while (next < cfg.replications) {
      const std::size_t stop = std::min(cfg.replications, next + jobs);
      std::vector<std::future<ReplicationRow>> futures;
      for (std::size_t r = next; r < stop; ++r) {
        futures.push_back(std::async(std::launch::async,
                                     [&cfg, r] { return run_replication(cfg, r); }));
      }
      for (std::size_t r = next; r < stop; ++r) {
        result.rows[r] = futures[r - next].get();
      }
      next = stop;
    }
  }

  // Aggregate over successful rows only; joined by replication index above
  // so the output is independent of worker count.
  std::vector<std::pair<std::string, std::vector<double>>> columns = {
      {"ate_true", {}},       {"ate_est", {}},       {"ate_abs_err", {}},
      {"ate_sq_err", {}},     {"cate_rmse", {}},     {"baseline_cate_rmse", {}},
      {"coverage", {}},       {"avg_interval_length", {}}, {"crossing_rate", {}},
      {"pit_ks", {}},         {"cate_corr", {}},     {"net_beats_baseline", {}}};
  for (const auto& row : result.rows) {
    if (!row.ok) continue;
    std::size_t c = 0;
    auto push = [&columns, &c](double v) { columns[c++].second.push_back(v); };
    push(row.report.ate_true);
    push(row.report.ate_est);
    push(std::abs(row.report.ate_true - row.report.ate_est));
    push(row.report.ate_sq_err);
    push(row.report.cate_rmse);
    push(row.report.baseline_cate_rmse);
    push(row.report.coverage);
    push(row.report.avg_interval_length);
    push(row.report.crossing_rate);
    push(row.report.pit_ks);
    push(row.cate_corr);
    push(row.net_beats_baseline ? 1.0 : 0.0);
  }
  for (const auto& [name, values] : columns) {
    if (values.empty()) continue;
    result.mean[name] = stats::mean(values);
    double sd = 0.0;
    if (values.size() > 1) {
      const double m = result.mean[name];
      double acc = 0.0;
      for (double v : values) acc += (v - m) * (v - m);
      sd = std::sqrt(acc / static_cast<double>(values.size() - 1));
    }
    result.sd[name] = sd;
  }
  return result;
}

std::vector<std::string> benchmark_csv_header() {
  return {"rep",          "seed",          "status",   "ate_true",
          "ate_est",      "ate_abs_err",   "ate_sq_err", "cate_rmse",
          "baseline_cate_rmse", "coverage", "avg_interval_length",
          "crossing_rate", "pit_ks",       "cate_corr", "net_beats_baseline"};
}

std::vector<std::string> benchmark_csv_row(const ReplicationRow& row) {
  if (!row.ok) {
    std::vector<std::string> out = {std::to_string(row.rep), std::to_string(row.seed),
                                    "failed"};
    for (std::size_t i = 3; i < benchmark_csv_header().size(); ++i) out.push_back("nan");
    return out;
  }
  return {std::to_string(row.rep),
          std::to_string(row.seed),
          "ok",
          format_double(row.report.ate_true),
          format_double(row.report.ate_est),
          format_double(std::abs(row.report.ate_true - row.report.ate_est)),
          format_double(row.report.ate_sq_err),
          format_double(row.report.cate_rmse),
          format_double(row.report.baseline_cate_rmse),
          format_double(row.report.coverage),
          format_double(row.report.avg_interval_length),
          format_double(row.report.crossing_rate),
          format_double(row.report.pit_ks),
          format_double(row.cate_corr),
          row.net_beats_baseline ? "1" : "0"};
}

}  // namespace genbayes::bench
