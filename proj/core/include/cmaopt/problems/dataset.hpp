#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cmaopt {

struct Provenance {
  enum class Source { Synthetic, Csv };
  Source source = Source::Synthetic;
  std::uint64_t seed = 0;
  std::string path;
  std::vector<std::string> feature_names;
  std::vector<std::string> target_names;
  /// Per-feature min/max before min-max scaling (CSV only).
  std::vector<double> feature_min;
  std::vector<double> feature_max;
};

/// Row-per-sample regression data.
struct Dataset {
  Eigen::MatrixXd inputs;   ///< P x d
  Eigen::MatrixXd targets;  ///< P x m
  Provenance provenance;

  std::size_t size() const { return static_cast<std::size_t>(inputs.rows()); }
  std::size_t input_dim() const { return static_cast<std::size_t>(inputs.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(targets.cols()); }
};

class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, std::size_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  /// 1-based line number in the source file, 0 when not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Header row, comma separated, decimal-point numbers. Columns named in
/// target_columns become targets (in the given order); every other column is
/// a feature. Features are min-max scaled to [0, 1]; constant columns map to 0.
Dataset load_csv(const std::filesystem::path& path, const std::vector<std::string>& target_columns);

/// Scales every input column to [0, 1] in place and returns the original
/// (min, max) pairs. Applying it to already scaled data is the identity.
std::vector<std::pair<double, double>> minmax_scale(Eigen::MatrixXd& columns);

}  // namespace cmaopt
