#ifndef GENBAYES_RNG_HPP_
#define GENBAYES_RNG_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "genbayes/errors.hpp"

namespace genbayes {

// splitmix64 step; used for seeding and for deriving sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Deterministic (seed, stream-index) -> sub-seed map.  Chunked or
// parallel generation draws from derive_seed(seed, chunk) streams so the
// result does not depend on scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed;
  std::uint64_t a = splitmix64(x);
  x ^= stream * 0xD1B54A32D192ED03ULL + 0x8BB84B93962EACC9ULL;
  std::uint64_t b = splitmix64(x);
  return a ^ (b + 0x165667B19E3779F9ULL + (a << 6) + (a >> 2));
}

// xoshiro256++ generator.  Same seed gives the same stream on every
// platform; uniforms take the top 53 bits so draws lie in [0,1).
// Gaussians are a Box-Muller transform of two uniforms with the second
// value cached.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
    has_cached_gaussian_ = false;
    cached_gaussian_ = 0.0;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (lo, hi) scaled from uniform().
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller.  u1 is reflected to (0,1] so the log
  // argument never vanishes.
  double gaussian() {
    if (has_cached_gaussian_) {
      has_cached_gaussian_ = false;
      return cached_gaussian_;
    }
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_gaussian_ = r * std::sin(a);
    has_cached_gaussian_ = true;
    return r * std::cos(a);
  }

  double gaussian(double mean, double sd) { return mean + sd * gaussian(); }

  int bernoulli(double p) { return uniform() < p ? 1 : 0; }

  // Uniform integer in [0, n).  Rejection-free modulo is fine here: n is
  // always tiny relative to 2^64 in this codebase (shuffles, index picks).
  std::size_t index(std::size_t n) {
    if (n == 0) throw ValueError("Rng::index: n must be positive");
    return static_cast<std::size_t>(next_u64() % n);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // Independent child stream; deterministic in (current seed path, stream).
  Rng derive(std::uint64_t stream) const {
    return Rng(derive_seed(state_[0] ^ state_[2], stream));
  }

  // Serializable state: 4 state words + gaussian cache.
  struct State {
    std::array<std::uint64_t, 4> s;
    bool has_cached;
    double cached;
  };

  State save_state() const { return State{state_, has_cached_gaussian_, cached_gaussian_}; }

  void restore_state(const State& st) {
    state_ = st.s;
    has_cached_gaussian_ = st.has_cached;
    cached_gaussian_ = st.cached;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  bool has_cached_gaussian_ = false;
  double cached_gaussian_ = 0.0;
};

}  // namespace genbayes

#endif  // GENBAYES_RNG_HPP_
