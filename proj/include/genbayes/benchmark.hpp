#ifndef GENBAYES_BENCHMARK_HPP_
#define GENBAYES_BENCHMARK_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "genbayes/causal.hpp"
#include "genbayes/metrics.hpp"
#include "genbayes/optimizer.hpp"

namespace genbayes::bench {

// One generate -> train -> evaluate pipeline, replicated with derived
// seeds.  Shared by the benchmark subcommand and the acceptance suite.
struct BenchmarkConfig {
  std::size_t replications = 20;
  std::size_t n = 1000;
  double sigma = 1.0;
  std::uint64_t seed = 1;
  causal::CausalArch arch;
  causal::LossWeights weights;
  nn::TrainConfig train;
  std::size_t M = 512;
  double level = 0.95;
  metrics::EvaluateOptions eval;
  std::size_t jobs = 1;

  BenchmarkConfig() {
    train.epochs = 300;
    train.batch_size = 100;
    train.learning_rate = 1e-3;
  }
};

struct ReplicationRow {
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  metrics::MetricsReport report;
  double cate_corr = 0.0;       // corr(per-unit posterior mean, tau_true)
  bool net_beats_baseline = false;
};

struct BenchmarkResult {
  std::vector<ReplicationRow> rows;
  std::map<std::string, double> mean;  // over successful replications
  std::map<std::string, double> sd;

  bool all_ok() const {
    for (const auto& r : rows)
      if (!r.ok) return false;
    return true;
  }
};

ReplicationRow run_replication(const BenchmarkConfig& cfg, std::size_t rep);

// Runs every replication (cfg.jobs workers), joining by index, then
// aggregates mean/sd per metric over the successful rows.
BenchmarkResult run_benchmark(const BenchmarkConfig& cfg);

std::vector<std::string> benchmark_csv_header();
std::vector<std::string> benchmark_csv_row(const ReplicationRow& row);

}  // namespace genbayes::bench

#endif  // GENBAYES_BENCHMARK_HPP_
