#ifndef GENBAYES_CONFIG_HPP_
#define GENBAYES_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>

namespace genbayes {

// Flat `key = value` config file: one pair per line, '#' comments.  Keys
// are written sorted so a resolved config is byte-reproducible.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig load(const std::string& path);
  void save(const std::string& path) const;

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  void set(const std::string& key, const char* value) { entries_[key] = value; }
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value);
  void set(const std::string& key, std::uint64_t value);
  void set(const std::string& key, bool value);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace genbayes

#endif  // GENBAYES_CONFIG_HPP_
