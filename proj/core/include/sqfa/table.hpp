#pragma once

#include <string>
#include <vector>

namespace sqfa {

/// Numeric table with named columns, emitted as CSV.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;

  /// Header line then one line per row. Doubles use the shortest
  /// round-trip form; non-finite values print as nan, inf, -inf.
  std::string to_csv() const;
};

}  // namespace sqfa
