#ifndef GENBAYES_STATS_HPP_
#define GENBAYES_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "genbayes/errors.hpp"

namespace genbayes::stats {

inline double mean(std::span<const double> v) {
  if (v.empty()) throw ValueError("mean of empty vector");
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

// Population-style variance (divisor n).
inline double variance(std::span<const double> v) {
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size());
}

inline double stddev(std::span<const double> v) { return std::sqrt(variance(v)); }

inline double correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw ValueError("correlation needs two equal-length vectors, length >= 2");
  }
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw ValueError("correlation of constant vector");
  return sab / std::sqrt(saa * sbb);
}

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw ValueError("cosine_similarity needs two equal-length vectors");
  }
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += a[i] * b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
  }
  if (saa == 0.0 || sbb == 0.0) throw ValueError("cosine_similarity of zero vector");
  return sab / std::sqrt(saa * sbb);
}

// Nearest-rank empirical quantile: the ceil(q*n)-th order statistic,
// clamped to the first for q near 0.  The project-wide quantile convention.
inline double nearest_rank_quantile(std::span<const double> sorted_values, double q) {
  if (sorted_values.empty()) throw ValueError("quantile of empty vector");
  if (q < 0.0 || q > 1.0) throw ValueError("quantile level outside [0,1]");
  const auto n = sorted_values.size();
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return sorted_values[rank - 1];
}

inline std::vector<double> sorted_copy(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  return s;
}

// Kolmogorov-Smirnov statistic of a sample against Uniform(0,1):
// sup_t |F_n(t) - t| over the sample points (both one-sided gaps).
inline double ks_uniform(std::span<const double> sample) {
  if (sample.empty()) throw ValueError("ks_uniform of empty sample");
  std::vector<double> s = sorted_copy(sample);
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(hi - s[i]), std::abs(s[i] - lo)));
  }
  return d;
}

struct Histogram {
  std::vector<double> edges;       // bins + 1 entries
  std::vector<std::size_t> counts; // bins entries
};

inline Histogram make_histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw ValueError("histogram needs at least one bin");
  if (values.empty()) throw ValueError("histogram of empty sample");
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) hi = lo + 1.0;  // degenerate sample: one wide bin range
  Histogram h;
  h.edges.resize(bins + 1);
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + width * static_cast<double>(b);
  for (double v : values) {
    auto idx = static_cast<std::size_t>((v - lo) / width);
    if (idx >= bins) idx = bins - 1;  // right edge lands in the last bin
    ++h.counts[idx];
  }
  return h;
}

// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

}  // namespace genbayes::stats

#endif  // GENBAYES_STATS_HPP_
