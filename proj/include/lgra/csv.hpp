#pragma once

#include <optional>
#include <string>
#include <vector>

namespace lgra {

// Shortest round-trip decimal representation; identical on every run.
std::string format_number(double v);
std::string format_number(const std::optional<double>& v);  // empty when absent

// Accumulates rows in memory and writes them in one go.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);
  void add_row(std::vector<std::string> cells);
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t size() const { return rows_.size(); }
  std::string str() const;
  void write(const std::string& path) const;  // throws std::runtime_error when unwritable

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace lgra
