#ifndef GENBAYES_EMBEDDING_HPP_
#define GENBAYES_EMBEDDING_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "genbayes/errors.hpp"

namespace genbayes {

// Cosine embedding of a quantile level: s_i = cos(i*pi*q), i = 1..m.
inline void cosine_embed_into(double q, std::span<double> out) {
  if (q < 0.0 || q > 1.0) throw ValueError("cosine_embed: q outside [0,1]");
  constexpr double kPi = 3.14159265358979323846;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::cos(static_cast<double>(i + 1) * kPi * q);
  }
}

inline std::vector<double> cosine_embed(double q, std::size_t m = 32) {
  std::vector<double> s(m);
  cosine_embed_into(q, s);
  return s;
}

}  // namespace genbayes

#endif  // GENBAYES_EMBEDDING_HPP_
