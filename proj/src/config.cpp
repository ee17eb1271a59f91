#include "genbayes/config.hpp"

#include <fstream>

#include "genbayes/csv.hpp"
#include "genbayes/errors.hpp"

namespace genbayes {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config: " + path);
  KeyValueConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw IoError("config " + path + " line " + std::to_string(lineno) +
                    ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw IoError("config " + path + " line " + std::to_string(lineno) + ": empty key");
    }
    cfg.entries_[key] = value;
  }
  return cfg;
}

void KeyValueConfig::save(const std::string& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open config for writing: " + path);
  for (const auto& [key, value] : entries_) {
    os << key << " = " << value << '\n';
  }
  if (!os) throw IoError("failed writing config: " + path);
}

void KeyValueConfig::set(const std::string& key, double value) {
  entries_[key] = format_double(value);
}
void KeyValueConfig::set(const std::string& key, std::int64_t value) {
  entries_[key] = std::to_string(value);
}
void KeyValueConfig::set(const std::string& key, std::uint64_t value) {
  entries_[key] = std::to_string(value);
}
void KeyValueConfig::set(const std::string& key, bool value) {
  entries_[key] = value ? "true" : "false";
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw IoError("config missing key: " + key);
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string s = get_string(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw IoError("");
    return v;
  } catch (...) {
    throw IoError("config key " + key + " is not a float: " + s);
  }
}

std::int64_t KeyValueConfig::get_int(const std::string& key) const {
  const std::string s = get_string(key);
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(s, &used);
    if (used != s.size()) throw IoError("");
    return v;
  } catch (...) {
    throw IoError("config key " + key + " is not an integer: " + s);
  }
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key) const {
  const std::string s = get_string(key);
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw IoError("");
    return v;
  } catch (...) {
    throw IoError("config key " + key + " is not an unsigned integer: " + s);
  }
}

bool KeyValueConfig::get_bool(const std::string& key) const {
  const std::string s = get_string(key);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw IoError("config key " + key + " is not a bool: " + s);
}

}  // namespace genbayes
