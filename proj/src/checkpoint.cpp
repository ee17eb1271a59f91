#include "genbayes/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "genbayes/errors.hpp"

namespace genbayes {

namespace {

enum EntryType : std::uint8_t { kDoubles = 0, kInts = 1, kU64s = 2, kString = 3 };

void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw IoError("checkpoint truncated while reading u64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_double(std::ostream& os, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  write_u64(os, bits);
}

double read_double(std::istream& is) {
  const std::uint64_t bits = read_u64(is);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

void write_key(std::ostream& os, const std::string& key, EntryType type,
               std::uint64_t count) {
  write_u64(os, key.size());
  os.write(key.data(), static_cast<std::streamsize>(key.size()));
  os.put(static_cast<char>(type));
  write_u64(os, count);
}

}  // namespace

void Checkpoint::put_doubles(const std::string& key, std::span<const double> v) {
  doubles_[key].assign(v.begin(), v.end());
}
void Checkpoint::put_ints(const std::string& key, std::span<const std::int64_t> v) {
  ints_[key].assign(v.begin(), v.end());
}
void Checkpoint::put_int(const std::string& key, std::int64_t v) {
  ints_[key].assign(1, v);
}
void Checkpoint::put_u64s(const std::string& key, std::span<const std::uint64_t> v) {
  u64s_[key].assign(v.begin(), v.end());
}
void Checkpoint::put_string(const std::string& key, const std::string& v) {
  strings_[key] = v;
}

bool Checkpoint::has(const std::string& key) const {
  return doubles_.count(key) || ints_.count(key) || u64s_.count(key) ||
         strings_.count(key);
}

const std::vector<double>& Checkpoint::doubles(const std::string& key) const {
  auto it = doubles_.find(key);
  if (it == doubles_.end()) throw IoError("checkpoint missing doubles key: " + key);
  return it->second;
}
const std::vector<std::int64_t>& Checkpoint::ints(const std::string& key) const {
  auto it = ints_.find(key);
  if (it == ints_.end()) throw IoError("checkpoint missing ints key: " + key);
  return it->second;
}
std::int64_t Checkpoint::int_value(const std::string& key) const {
  const auto& v = ints(key);
  if (v.size() != 1) throw IoError("checkpoint key is not a scalar int: " + key);
  return v[0];
}
const std::vector<std::uint64_t>& Checkpoint::u64s(const std::string& key) const {
  auto it = u64s_.find(key);
  if (it == u64s_.end()) throw IoError("checkpoint missing u64s key: " + key);
  return it->second;
}
const std::string& Checkpoint::string_value(const std::string& key) const {
  auto it = strings_.find(key);
  if (it == strings_.end()) throw IoError("checkpoint missing string key: " + key);
  return it->second;
}

void Checkpoint::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open checkpoint for writing: " + path);
  os.write(kMagic, 8);
  write_u64(os, doubles_.size() + ints_.size() + u64s_.size() + strings_.size());
  for (const auto& [key, v] : doubles_) {
    write_key(os, key, kDoubles, v.size());
    for (double d : v) write_double(os, d);
  }
  for (const auto& [key, v] : ints_) {
    write_key(os, key, kInts, v.size());
    for (std::int64_t x : v) write_u64(os, static_cast<std::uint64_t>(x));
  }
  for (const auto& [key, v] : u64s_) {
    write_key(os, key, kU64s, v.size());
    for (std::uint64_t x : v) write_u64(os, x);
  }
  for (const auto& [key, v] : strings_) {
    write_key(os, key, kString, v.size());
    os.write(v.data(), static_cast<std::streamsize>(v.size()));
  }
  if (!os) throw IoError("failed writing checkpoint: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) {
    throw IoError("not a checkpoint file (bad magic): " + path);
  }
  Checkpoint ckpt;
  const std::uint64_t entries = read_u64(is);
  for (std::uint64_t e = 0; e < entries; ++e) {
    const std::uint64_t keylen = read_u64(is);
    std::string key(keylen, '\0');
    is.read(key.data(), static_cast<std::streamsize>(keylen));
    const int type = is.get();
    if (!is) throw IoError("checkpoint truncated in entry header: " + path);
    const std::uint64_t count = read_u64(is);
    switch (type) {
      case kDoubles: {
        std::vector<double> v(count);
        for (auto& d : v) d = read_double(is);
        ckpt.doubles_[key] = std::move(v);
        break;
      }
      case kInts: {
        std::vector<std::int64_t> v(count);
        for (auto& x : v) x = static_cast<std::int64_t>(read_u64(is));
        ckpt.ints_[key] = std::move(v);
        break;
      }
      case kU64s: {
        std::vector<std::uint64_t> v(count);
        for (auto& x : v) x = read_u64(is);
        ckpt.u64s_[key] = std::move(v);
        break;
      }
      case kString: {
        std::string v(count, '\0');
        is.read(v.data(), static_cast<std::streamsize>(count));
        if (!is) throw IoError("checkpoint truncated in string: " + path);
        ckpt.strings_[key] = std::move(v);
        break;
      }
      default:
        throw IoError("checkpoint has unknown entry type: " + path);
    }
  }
  return ckpt;
}

namespace nn {

void save_mlp(Checkpoint& ckpt, const std::string& prefix, const Mlp& net) {
  std::vector<std::int64_t> dims;
  dims.push_back(static_cast<std::int64_t>(net.in_dim()));
  std::string acts;
  for (const auto& layer : net.layers()) {
    dims.push_back(static_cast<std::int64_t>(layer.out_dim()));
    if (!acts.empty()) acts += ",";
    acts += activation_name(layer.activation);
  }
  ckpt.put_ints(prefix + "/dims", dims);
  ckpt.put_string(prefix + "/activations", acts);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto& layer = net.layers()[l];
    ckpt.put_doubles(prefix + "/W" + std::to_string(l), layer.weights.data());
    ckpt.put_doubles(prefix + "/b" + std::to_string(l), layer.bias);
  }
}

Mlp load_mlp(const Checkpoint& ckpt, const std::string& prefix) {
  const auto& dims = ckpt.ints(prefix + "/dims");
  if (dims.size() < 2) throw IoError("checkpoint mlp dims too short: " + prefix);
  const std::string acts = ckpt.string_value(prefix + "/activations");
  std::vector<Activation> act_list;
  std::size_t pos = 0;
  while (pos <= acts.size()) {
    const std::size_t comma = acts.find(',', pos);
    const std::string tok =
        acts.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    act_list.push_back(activation_from_name(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (act_list.size() != dims.size() - 1) {
    throw IoError("checkpoint mlp activation count mismatch: " + prefix);
  }
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer(static_cast<std::size_t>(dims[l]),
                     static_cast<std::size_t>(dims[l + 1]), act_list[l]);
    const auto& w = ckpt.doubles(prefix + "/W" + std::to_string(l));
    const auto& b = ckpt.doubles(prefix + "/b" + std::to_string(l));
    if (w.size() != layer.weights.size() || b.size() != layer.bias.size()) {
      throw IoError("checkpoint mlp layer size mismatch: " + prefix);
    }
    layer.weights.data() = w;
    layer.bias = b;
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

void save_optimizer_state(Checkpoint& ckpt, const std::string& prefix,
                          const Optimizer::State& st) {
  ckpt.put_int(prefix + "/t", st.t);
  ckpt.put_int(prefix + "/slots", static_cast<std::int64_t>(st.m.size()));
  for (std::size_t i = 0; i < st.m.size(); ++i) {
    ckpt.put_doubles(prefix + "/m" + std::to_string(i), st.m[i]);
    ckpt.put_doubles(prefix + "/v" + std::to_string(i), st.v[i]);
  }
}

Optimizer::State load_optimizer_state(const Checkpoint& ckpt, const std::string& prefix) {
  Optimizer::State st;
  st.t = ckpt.int_value(prefix + "/t");
  const auto slots = static_cast<std::size_t>(ckpt.int_value(prefix + "/slots"));
  st.m.resize(slots);
  st.v.resize(slots);
  for (std::size_t i = 0; i < slots; ++i) {
    st.m[i] = ckpt.doubles(prefix + "/m" + std::to_string(i));
    st.v[i] = ckpt.doubles(prefix + "/v" + std::to_string(i));
  }
  return st;
}

void save_rng_state(Checkpoint& ckpt, const std::string& prefix, const Rng::State& st) {
  std::vector<std::uint64_t> words(st.s.begin(), st.s.end());
  words.push_back(st.has_cached ? 1 : 0);
  ckpt.put_u64s(prefix + "/state", words);
  ckpt.put_doubles(prefix + "/cache", std::vector<double>{st.cached});
}

Rng::State load_rng_state(const Checkpoint& ckpt, const std::string& prefix) {
  const auto& words = ckpt.u64s(prefix + "/state");
  if (words.size() != 5) throw IoError("checkpoint rng state malformed: " + prefix);
  Rng::State st;
  for (int i = 0; i < 4; ++i) st.s[static_cast<std::size_t>(i)] = words[static_cast<std::size_t>(i)];
  st.has_cached = words[4] != 0;
  st.cached = ckpt.doubles(prefix + "/cache").at(0);
  return st;
}

}  // namespace nn

}  // namespace genbayes
