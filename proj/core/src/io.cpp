#include "sqfa/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "sqfa/error.hpp"

namespace sqfa {

namespace {

using nlohmann::json;

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& detail) {
  std::ostringstream os;
  os << "line " << line_no << ": " << detail;
  raise(ErrorCode::ParseError, os.str());
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no, std::size_t column) {
  field = trim(field);
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    std::ostringstream os;
    os << "column " << column << ": cannot parse '" << field << "' as a number";
    parse_error(line_no, os.str());
  }
  return value;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, Index expected_rows, Index expected_cols,
                        const char* what) {
  if (!rows.is_array() || static_cast<Index>(rows.size()) != expected_rows) {
    raise(ErrorCode::ParseError, std::string(what) + ": wrong number of rows");
  }
  Matrix m(expected_rows, expected_cols);
  for (Index r = 0; r < expected_rows; ++r) {
    const json& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != expected_cols) {
      std::ostringstream os;
      os << what << ": row " << r << " has the wrong number of entries";
      raise(ErrorCode::ParseError, os.str());
    }
    for (Index c = 0; c < expected_cols; ++c) {
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::ParseError, e.what());
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) raise(ErrorCode::IoError, "number formatting failed");
  return std::string(buf, ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out << text;
    if (!out.flush()) raise(ErrorCode::IoError, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) raise(ErrorCode::IoError, "cannot rename onto '" + path.string() + "': " + ec.message());
}

LabeledDataset parse_dataset_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  Index n = -1;

  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) raise(ErrorCode::ParseError, "empty dataset file");
  {
    const auto header = split_fields(trim(line));
    if (header.size() < 2 || trim(header[0]) != "label") {
      parse_error(line_no, "header must be 'label,x0,...,x{n-1}'");
    }
    for (std::size_t k = 1; k < header.size(); ++k) {
      if (trim(header[k]) != "x" + std::to_string(k - 1)) {
        parse_error(line_no, "header column " + std::to_string(k) + " must be 'x" +
                                 std::to_string(k - 1) + "'");
      }
    }
    n = static_cast<Index>(header.size()) - 1;
  }

  std::vector<int> labels;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto fields = split_fields(row);
    if (static_cast<Index>(fields.size()) != n + 1) {
      std::ostringstream os;
      os << "row has " << fields.size() << " columns, expected " << n + 1;
      parse_error(line_no, os.str());
    }
    const int label = parse_number<int>(fields[0], line_no, 0);
    if (label < 0) {
      std::ostringstream os;
      os << "line " << line_no << ": label " << label << " is negative";
      raise(ErrorCode::LabelOutOfRange, os.str());
    }
    labels.push_back(label);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      values.push_back(parse_number<double>(fields[k], line_no, k));
    }
  }
  const auto rows = static_cast<Index>(labels.size());
  Matrix samples = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                  Eigen::RowMajor>>(values.data(), rows, n);
  return LabeledDataset(std::move(samples), std::move(labels));
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  return parse_dataset_csv(read_text_file(path));
}

std::string dataset_to_csv(const LabeledDataset& data) {
  std::string out = "label";
  for (Index k = 0; k < data.dim(); ++k) out += ",x" + std::to_string(k);
  out += '\n';
  for (Index s = 0; s < data.size(); ++s) {
    out += std::to_string(data.labels()[static_cast<std::size_t>(s)]);
    for (Index k = 0; k < data.dim(); ++k) {
      out += ',';
      out += format_double(data.samples()(s, k));
    }
    out += '\n';
  }
  return out;
}

void save_dataset(const LabeledDataset& data, const std::filesystem::path& path) {
  write_text_file_atomic(path, dataset_to_csv(data));
}

std::string stats_to_json(const ClassEnsemble& ens) {
  json classes = json::array();
  for (int i = 0; i < ens.num_classes(); ++i) {
    const ClassMoments& c = ens[i];
    json mean = json::array();
    for (Index k = 0; k < c.mean.size(); ++k) mean.push_back(c.mean(k));
    classes.push_back({{"label", i},
                       {"count", c.count},
                       {"mean", std::move(mean)},
                       {"covariance", matrix_to_json(c.covariance)}});
  }
  json doc = {{"n", ens.dim()}, {"classes", std::move(classes)}};
  return doc.dump(1) + "\n";
}

ClassEnsemble stats_from_json(const std::string& text) {
  const json doc = parse_json(text);
  try {
    const auto n = doc.at("n").get<Index>();
    const json& classes = doc.at("classes");
    std::vector<Index> counts(classes.size());
    std::vector<Vector> means(classes.size());
    std::vector<Matrix> covs(classes.size());
    std::vector<bool> seen(classes.size(), false);
    for (const json& c : classes) {
      const int label = c.at("label").get<int>();
      if (label < 0 || static_cast<std::size_t>(label) >= classes.size()) {
        raise(ErrorCode::LabelOutOfRange,
              "stats label " + std::to_string(label) + " outside [0, c)");
      }
      const auto idx = static_cast<std::size_t>(label);
      if (seen[idx]) raise(ErrorCode::ParseError, "duplicate label " + std::to_string(label));
      seen[idx] = true;
      counts[idx] = c.at("count").get<Index>();
      const auto& mean = c.at("mean");
      if (static_cast<Index>(mean.size()) != n) {
        raise(ErrorCode::ParseError, "mean of class " + std::to_string(label) + " has wrong length");
      }
      means[idx].resize(n);
      for (Index k = 0; k < n; ++k) means[idx](k) = mean[static_cast<std::size_t>(k)].get<double>();
      covs[idx] = matrix_from_json(c.at("covariance"), n, n, "covariance");
    }
    return ClassEnsemble::from_moments(n, counts, means, covs);
  } catch (const json::exception& e) {
    raise(ErrorCode::ParseError, e.what());
  }
}

void save_stats(const ClassEnsemble& ens, const std::filesystem::path& path) {
  write_text_file_atomic(path, stats_to_json(ens));
}

ClassEnsemble load_stats(const std::filesystem::path& path) {
  return stats_from_json(read_text_file(path));
}

std::string filters_to_json(const FilterFile& file) {
  const Matrix& f = file.filters.matrix();
  json doc = {{"n", f.rows()},
              {"m", f.cols()},
              {"sigma2", file.sigma2},
              {"kind", file.kind},
              {"filters", matrix_to_json(f)}};
  return doc.dump(1) + "\n";
}

FilterFile filters_from_json(const std::string& text) {
  const json doc = parse_json(text);
  try {
    const auto n = doc.at("n").get<Index>();
    const auto m = doc.at("m").get<Index>();
    Matrix f = matrix_from_json(doc.at("filters"), n, m, "filters");
    return FilterFile{FilterBank(std::move(f)), doc.at("sigma2").get<double>(),
                      doc.at("kind").get<std::string>()};
  } catch (const json::exception& e) {
    raise(ErrorCode::ParseError, e.what());
  }
}

void save_filters(const FilterFile& file, const std::filesystem::path& path) {
  write_text_file_atomic(path, filters_to_json(file));
}

FilterFile load_filters(const std::filesystem::path& path) {
  return filters_from_json(read_text_file(path));
}

}  // namespace sqfa
