#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "cmaopt/bench/profile.hpp"
#include "cmaopt/solvers.hpp"

namespace cmaopt::bench {

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, const std::filesystem::path& path)
      : std::runtime_error(what + ": " + path.string()), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// One JSON object per line and per record:
///   {"k":..,"f":..,"zeta":..,"alpha":..,"dnorm":..,"branch":"..","probes":..,
///    "evals":{"full":..,"cval":..,"cgrad":..,"epochs":..},"t":..}
/// Doubles are written in shortest round-trip form.
void write_trace(std::ostream& out, const RunTrace& trace);
void emit_trace(const RunTrace& trace, const std::filesystem::path& path);

/// Records only; solver, stop reason and error are not part of the format.
RunTrace read_trace(std::istream& in);
RunTrace parse_trace(const std::filesystem::path& path);

/// CSV with header "alpha,<solver>..." and one row per grid point.
void emit_profile_csv(const ProfileTable& table, const std::filesystem::path& path);
/// Whitespace-separated columns with a '#' comment header, for gnuplot.
void emit_profile_columns(const ProfileTable& table, const std::filesystem::path& path);

}  // namespace cmaopt::bench
