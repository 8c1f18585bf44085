#pragma once

#include <string>
#include <vector>

namespace synthlearn {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  // Rendered byte-for-byte deterministically: '\n' line ends, minimal quoting.
  std::string render() const;
  void write(const std::string& path) const;

private:
  CsvTable table_;
};

// Fixed-notation formatting used for every numeric CSV field so reruns are
// byte-identical across platforms.
std::string format_double(double v, int precision = 9);

}  // namespace synthlearn
