#include "genbayes/csv.hpp"

namespace genbayes {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open csv: " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty csv: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split_line(line);
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != table.header.size()) {
      throw IoError("csv row width mismatch in " + path);
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

}  // namespace genbayes
