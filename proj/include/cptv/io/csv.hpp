#pragma once

// Minimal numeric CSV: one header line, comma-separated, '.' decimals.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace cptv::io {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Reads a numeric table. When `expected` is non-empty the header must match
// it exactly. Malformed cells raise ConfigError naming the line.
CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& expected = {});

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::size_t width_;
};

}  // namespace cptv::io
