#pragma once

// File formats:
//   dataset CSV   header `label,x0,...,x{n-1}`, one sample per row
//   stats JSON    {"n", "classes": [{"label", "count", "mean", "covariance"}]}
//   filter JSON   {"n", "m", "sigma2", "kind", "filters": [[row-major n x m]]}
// Numbers are written in shortest round-trip form, so load(save(x)) == x bitwise.

#include <filesystem>
#include <string>

#include "sqfa/class_stats.hpp"
#include "sqfa/filter_bank.hpp"

namespace sqfa {

LabeledDataset load_dataset(const std::filesystem::path& path);
LabeledDataset parse_dataset_csv(const std::string& text);
std::string dataset_to_csv(const LabeledDataset& data);
void save_dataset(const LabeledDataset& data, const std::filesystem::path& path);

std::string stats_to_json(const ClassEnsemble& ens);
ClassEnsemble stats_from_json(const std::string& text);
void save_stats(const ClassEnsemble& ens, const std::filesystem::path& path);
ClassEnsemble load_stats(const std::filesystem::path& path);

struct FilterFile {
  FilterBank filters;
  double sigma2 = 0.0;
  std::string kind;
};

std::string filters_to_json(const FilterFile& file);
FilterFile filters_from_json(const std::string& text);
void save_filters(const FilterFile& file, const std::filesystem::path& path);
FilterFile load_filters(const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames over `path`.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace sqfa
