#include "cmaopt/problems/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>

namespace cmaopt {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == s.npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::pair<double, double>> minmax_scale(Eigen::MatrixXd& columns) {
  std::vector<std::pair<double, double>> ranges;
  ranges.reserve(static_cast<std::size_t>(columns.cols()));
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    auto col = columns.col(j);
    const double lo = col.size() ? col.minCoeff() : 0.0;
    const double hi = col.size() ? col.maxCoeff() : 0.0;
    ranges.emplace_back(lo, hi);
    if (hi > lo) {
      col = (col.array() - lo) / (hi - lo);
    } else {
      col.setZero();
    }
  }
  return ranges;
}

Dataset load_csv(const std::filesystem::path& path, const std::vector<std::string>& target_columns) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'", 0);

  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "' is empty", 1);
  std::vector<std::string> header;
  for (auto f : split_fields(line)) header.emplace_back(trim(f));

  std::vector<std::size_t> target_idx;
  for (const auto& name : target_columns) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("missing target column '" + name + "'", 1);
    target_idx.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  if (target_idx.empty()) throw DataError("no target columns given", 0);
  std::vector<std::size_t> feature_idx;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (std::find(target_idx.begin(), target_idx.end(), j) == target_idx.end()) {
      feature_idx.push_back(j);
    }
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError("expected " + std::to_string(header.size()) + " fields, found " +
                          std::to_string(fields.size()),
                      line_no);
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto cell = trim(fields[j]);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw DataError("non-numeric value '" + std::string(cell) + "' in column '" + header[j] + "'",
                        line_no);
      }
      row[j] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("'" + path.string() + "' has no data rows", 0);

  Dataset data;
  const auto count = static_cast<Eigen::Index>(rows.size());
  data.inputs.resize(count, static_cast<Eigen::Index>(feature_idx.size()));
  data.targets.resize(count, static_cast<Eigen::Index>(target_idx.size()));
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < feature_idx.size(); ++j)
      data.inputs(i, static_cast<Eigen::Index>(j)) = row[feature_idx[j]];
    for (std::size_t j = 0; j < target_idx.size(); ++j)
      data.targets(i, static_cast<Eigen::Index>(j)) = row[target_idx[j]];
  }

  Provenance& prov = data.provenance;
  prov.source = Provenance::Source::Csv;
  prov.path = path.string();
  for (auto j : feature_idx) prov.feature_names.push_back(header[j]);
  prov.target_names = target_columns;
  for (const auto& [lo, hi] : minmax_scale(data.inputs)) {
    prov.feature_min.push_back(lo);
    prov.feature_max.push_back(hi);
  }
  return data;
}

}  // namespace cmaopt
