#ifndef GENBAYES_CHECKPOINT_HPP_
#define GENBAYES_CHECKPOINT_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "genbayes/mlp.hpp"
#include "genbayes/optimizer.hpp"
#include "genbayes/rng.hpp"

namespace genbayes {

// Versioned binary key-value container for model state.  Keys are written
// sorted, payloads little-endian, doubles as raw IEEE-754 bits, so a
// save/load round trip is bit-exact and re-saving reproduces the file
// byte-for-byte.
class Checkpoint {
 public:
  static constexpr char kMagic[9] = "GBCKPT01";

  void put_doubles(const std::string& key, std::span<const double> v);
  void put_ints(const std::string& key, std::span<const std::int64_t> v);
  void put_int(const std::string& key, std::int64_t v);
  void put_u64s(const std::string& key, std::span<const std::uint64_t> v);
  void put_string(const std::string& key, const std::string& v);

  bool has(const std::string& key) const;
  const std::vector<double>& doubles(const std::string& key) const;
  const std::vector<std::int64_t>& ints(const std::string& key) const;
  std::int64_t int_value(const std::string& key) const;
  const std::vector<std::uint64_t>& u64s(const std::string& key) const;
  const std::string& string_value(const std::string& key) const;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);

 private:
  std::map<std::string, std::vector<double>> doubles_;
  std::map<std::string, std::vector<std::int64_t>> ints_;
  std::map<std::string, std::vector<std::uint64_t>> u64s_;
  std::map<std::string, std::string> strings_;
};

namespace nn {

// Mlp <-> checkpoint under a key prefix: dims, activation tags, weights, biases.
void save_mlp(Checkpoint& ckpt, const std::string& prefix, const Mlp& net);
Mlp load_mlp(const Checkpoint& ckpt, const std::string& prefix);

void save_optimizer_state(Checkpoint& ckpt, const std::string& prefix,
                          const Optimizer::State& st);
Optimizer::State load_optimizer_state(const Checkpoint& ckpt, const std::string& prefix);

void save_rng_state(Checkpoint& ckpt, const std::string& prefix, const Rng::State& st);
Rng::State load_rng_state(const Checkpoint& ckpt, const std::string& prefix);

}  // namespace nn

}  // namespace genbayes

#endif  // GENBAYES_CHECKPOINT_HPP_
