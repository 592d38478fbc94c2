#pragma once

#include <span>
#include <string>
#include <vector>

namespace mgt {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

/// Inverse of format_double; throws on malformed input.
double parse_double(const std::string& s);

/// Minimal CSV emitter: header row mandatory, "\n" newlines, UTF-8,
/// numbers in shortest round-trip form so identical data gives identical
/// bytes.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(std::span<const double> values);
  void add_row_mixed(std::span<const std::string> values);

  const std::string& str() const { return out_; }
  void write_file(const std::string& path) const;

 private:
  std::size_t columns_ = 0;
  std::string out_;
};

}  // namespace mgt
