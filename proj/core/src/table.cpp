#include "sqfa/table.hpp"

#include <algorithm>

#include "sqfa/error.hpp"
#include "sqfa/io.hpp"

namespace sqfa {

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    raise(ErrorCode::DimensionMismatch, "row has " + std::to_string(row.size()) +
                                            " values, table has " +
                                            std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) raise(ErrorCode::InvalidArgument, "no column named " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::column(const std::string& name) const {
  const std::size_t idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[idx]);
  return out;
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j) out += ',';
    out += columns[j];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace sqfa
