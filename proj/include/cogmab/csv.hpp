#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace cogmab {

// Shortest-round-trip decimal rendering for doubles in CSV output.
inline std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

// Line-oriented CSV writer: UTF-8, LF endings, no quoting (fields are
// numeric or fixed tokens).
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path)
      : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  }

  void raw_line(const std::string& line) { out_ << line << '\n'; }

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ","), first = false, put(fields)), ...);
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("error while writing: " + path_);
  }

 private:
  void put(double v) { out_ << format_double(v); }
  void put(float v) { out_ << format_double(v); }
  template <typename T>
  void put(const T& v) { out_ << v; }

  std::ofstream out_;
  std::string path_;
};

}  // namespace cogmab
