#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace ssb {

// Shortest decimal representation that round-trips to the same double;
// identical bytes on every platform with IEEE doubles.
std::string format_double(double value);

// Minimal CSV emitter. All numeric cells go through format_double so repeated
// runs of the same computation produce byte-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);

  void row(const std::vector<std::string>& cells);
  static std::string cell(double value) { return format_double(value); }
  static std::string cell(long value) { return std::to_string(value); }
  static std::string cell(int value) { return std::to_string(value); }
  static std::string cell(bool value) { return value ? "1" : "0"; }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  size_t n_columns_;
};

}  // namespace ssb
