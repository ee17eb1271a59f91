#include "genbayes/dgp.hpp"

#include <cmath>

#include "genbayes/activations.hpp"
#include "genbayes/csv.hpp"
#include "genbayes/stats.hpp"

namespace genbayes::dgp {

CausalDataset CausalDataset::observational_view() const {
  CausalDataset view;
  view.n = n;
  view.p = p;
  view.x = x;
  view.z = z;
  view.y = y;
  view.sigma = sigma;
  view.seed = seed;
  return view;
}

double causal_mu(double x1, double x2) {
  return -6.0 + (x1 > x2 ? 1.0 : 0.0) + 6.0 * std::abs(x2 - 1.0);
}

double causal_tau_raw(double x2, double x3) { return 1.0 - 2.0 * x2 * x3; }

CausalDataset gen_causal(std::size_t n, double sigma, std::uint64_t seed,
                         const GenCausalOptions& opts) {
  if (n == 0) throw ValueError("gen_causal: n must be >= 1");
  if (sigma < 0.0) throw ValueError("gen_causal: sigma must be >= 0");
  if (opts.p < 3) throw ValueError("gen_causal: p must be >= 3");

  CausalDataset ds;
  ds.n = n;
  ds.p = opts.p;
  ds.sigma = sigma;
  ds.seed = seed;
  ds.x = Matrix(n, opts.p);
  ds.z.resize(n);
  ds.y.resize(n);
  ds.mu_true.resize(n);
  ds.tau_raw.resize(n);
  ds.pi_true.resize(n);

  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < opts.p; ++j) ds.x(i, j) = rng.gaussian();
  }
  for (std::size_t i = 0; i < n; ++i) {
    ds.mu_true[i] = causal_mu(ds.x(i, 0), ds.x(i, 1));
    ds.pi_true[i] = nn::sigmoid(ds.mu_true[i]);
    ds.tau_raw[i] = causal_tau_raw(ds.x(i, 1), ds.x(i, 2));
  }
  for (std::size_t i = 0; i < n; ++i) {
    ds.z[i] = rng.bernoulli(ds.pi_true[i]);
  }

  StandardizedTau st = standardize_tau(ds.tau_raw);
  ds.tau_true = std::move(st.tau_std);
  ds.tau_mean = st.mean;
  ds.tau_sd = st.sd;

  for (std::size_t i = 0; i < n; ++i) {
    const double effect = opts.use_raw_tau ? ds.tau_raw[i] : ds.tau_true[i];
    const double ey = ds.mu_true[i] + effect * static_cast<double>(ds.z[i]);
    ds.y[i] = rng.gaussian(ey, sigma);
  }
  return ds;
}

StandardizedTau standardize_tau(std::span<const double> tau_raw) {
  if (tau_raw.size() < 2) throw ValueError("standardize_tau: need at least 2 values");
  const double m = stats::mean(tau_raw);
  const double sd = stats::stddev(tau_raw);
  if (!(sd > 0.0)) throw ValueError("standardize_tau: zero variance");
  StandardizedTau out;
  out.mean = m;
  out.sd = sd;
  out.tau_std.resize(tau_raw.size());
  for (std::size_t i = 0; i < tau_raw.size(); ++i) {
    out.tau_std[i] = (tau_raw[i] - m) / sd;
  }
  return out;
}

ConjugateDataset gen_conjugate(std::size_t N, double prior_mean, double prior_sd,
                               double like_sd, std::uint64_t seed,
                               std::size_t obs_per_draw) {
  if (N == 0) throw ValueError("gen_conjugate: N must be >= 1");
  if (!(prior_sd > 0.0) || !(like_sd > 0.0)) {
    throw ValueError("gen_conjugate: sds must be > 0");
  }
  if (obs_per_draw == 0) throw ValueError("gen_conjugate: obs_per_draw must be >= 1");

  ConjugateDataset ds;
  ds.prior_mean = prior_mean;
  ds.prior_sd = prior_sd;
  ds.like_sd = like_sd;
  ds.seed = seed;
  ds.theta.resize(N);
  ds.y = Matrix(N, obs_per_draw);

  Rng rng(seed);
  for (std::size_t i = 0; i < N; ++i) {
    ds.theta[i] = rng.gaussian(prior_mean, prior_sd);
    for (std::size_t j = 0; j < obs_per_draw; ++j) {
      ds.y(i, j) = rng.gaussian(ds.theta[i], like_sd);
    }
  }
  return ds;
}

double true_ate(const CausalDataset& ds) {
  if (!ds.has_ground_truth()) throw ValueError("true_ate: dataset has no ground truth");
  return stats::mean(ds.tau_true);
}

void write_dataset_csv(const CausalDataset& ds, const std::string& path,
                       bool include_ground_truth) {
  if (include_ground_truth && !ds.has_ground_truth()) {
    throw ValueError("write_dataset_csv: dataset has no ground truth");
  }
  std::vector<std::string> header = {"unit_id"};
  for (std::size_t j = 0; j < ds.p; ++j) header.push_back("x" + std::to_string(j + 1));
  header.push_back("z");
  header.push_back("y");
  if (include_ground_truth) {
    header.push_back("mu_true");
    header.push_back("tau_true");
    header.push_back("pi_true");
  }
  CsvWriter w(path, header);
  for (std::size_t i = 0; i < ds.n; ++i) {
    w.field(i);
    for (std::size_t j = 0; j < ds.p; ++j) w.field(ds.x(i, j));
    w.field(ds.z[i]);
    w.field(ds.y[i]);
    if (include_ground_truth) {
      w.field(ds.mu_true[i]);
      w.field(ds.tau_true[i]);
      w.field(ds.pi_true[i]);
    }
    w.end_row();
  }
  w.close();
}

CausalDataset read_dataset_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  CausalDataset ds;
  ds.n = table.rows.size();
  if (ds.n == 0) throw IoError("dataset csv has no rows: " + path);

  std::size_t p = 0;
  while (true) {
    bool found = false;
    for (const auto& h : table.header) {
      if (h == "x" + std::to_string(p + 1)) {
        found = true;
        break;
      }
    }
    if (!found) break;
    ++p;
  }
  if (p == 0) throw IoError("dataset csv has no covariate columns: " + path);
  ds.p = p;

  std::vector<std::size_t> xcol(p);
  for (std::size_t j = 0; j < p; ++j) xcol[j] = table.column("x" + std::to_string(j + 1));
  const std::size_t zcol = table.column("z");
  const std::size_t ycol = table.column("y");
  const bool truth = [&] {
    for (const auto& h : table.header)
      if (h == "tau_true") return true;
    return false;
  }();

  ds.x = Matrix(ds.n, p);
  ds.z.resize(ds.n);
  ds.y.resize(ds.n);
  if (truth) {
    ds.mu_true.resize(ds.n);
    ds.tau_true.resize(ds.n);
    ds.pi_true.resize(ds.n);
  }
  const std::size_t mucol = truth ? table.column("mu_true") : 0;
  const std::size_t taucol = truth ? table.column("tau_true") : 0;
  const std::size_t picol = truth ? table.column("pi_true") : 0;

  for (std::size_t i = 0; i < ds.n; ++i) {
    const auto& row = table.rows[i];
    for (std::size_t j = 0; j < p; ++j) ds.x(i, j) = std::stod(row[xcol[j]]);
    ds.z[i] = std::stoi(row[zcol]);
    if (ds.z[i] != 0 && ds.z[i] != 1) {
      throw IoError("dataset csv has non-binary treatment in row " + std::to_string(i));
    }
    ds.y[i] = std::stod(row[ycol]);
    if (truth) {
      ds.mu_true[i] = std::stod(row[mucol]);
      ds.tau_true[i] = std::stod(row[taucol]);
      ds.pi_true[i] = std::stod(row[picol]);
    }
  }
  return ds;
}

}  // namespace genbayes::dgp
