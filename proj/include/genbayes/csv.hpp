#ifndef GENBAYES_CSV_HPP_
#define GENBAYES_CSV_HPP_

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "genbayes/errors.hpp"

namespace genbayes {

// Floats are serialized with 17 significant digits, the round-trip-exact
// format used by every CSV artifact in this project.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : os_(path, std::ios::trunc) {
    if (!os_) throw IoError("cannot open for writing: " + path);
    path_ = path;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) os_ << ',';
      os_ << header[i];
    }
    os_ << '\n';
  }

  void field(const std::string& s) {
    if (col_) os_ << ',';
    os_ << s;
    ++col_;
  }
  void field(double v) { field(format_double(v)); }
  void field(std::int64_t v) { field(std::to_string(v)); }
  void field(std::size_t v) { field(std::to_string(v)); }
  void field(int v) { field(std::to_string(v)); }

  void end_row() {
    os_ << '\n';
    col_ = 0;
  }

  void close() {
    os_.close();
    if (os_.fail()) throw IoError("failed writing: " + path_);
  }

 private:
  std::ofstream os_;
  std::string path_;
  std::size_t col_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw IoError("csv missing column: " + name);
  }
};

// Minimal reader for this project's own artifacts: comma-separated, no
// quoting, first line is the header.
CsvTable read_csv(const std::string& path);

}  // namespace genbayes

#endif  // GENBAYES_CSV_HPP_
