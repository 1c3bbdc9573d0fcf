#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace dualest {

/// Shortest round-trippable decimal form of a double; stable across reruns.
std::string format_number(double value);
std::string format_number(long value);

/// Plain CSV emitter: optional '#' comment lines, one header row, data rows.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void comment(const std::string& text);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
};

}  // namespace dualest
