#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cmaopt/solvers.hpp"

namespace cmaopt::bench {

/// Seconds to solve, or nullopt when the run never solved the problem.
using Cost = std::optional<double>;

inline const std::vector<double> kDefaultTaus{1e-1, 1e-2, 1e-4};

/// f <= fL + tau (f0 - fL). Throws std::invalid_argument when f0 < fL.
bool solved_test(double f, double f0, double fL, double tau);

/// Elapsed time of the first trace record that passes solved_test.
Cost time_to_solve(const RunTrace& trace, double f0, double fL, double tau);

/// Smallest recorded f in a trace.
double best_value(const RunTrace& trace);

struct ProfileTable {
  std::vector<std::string> solvers;
  std::size_t num_problems = 0;
  /// ratios[s][p] = c_{s,p} / min_s c_{s,p}; +inf when s did not solve p.
  std::vector<std::vector<double>> ratios;
  std::vector<double> alpha_grid;
  /// rho[s][i] = rho_s(alpha_grid[i]).
  std::vector<std::vector<double>> rho;

  /// Exact step-function value |{p : r_{s,p} <= alpha}| / |P|.
  double rho_at(std::size_t solver, double alpha) const;
};

/// 1.0, 1.1, ..., 10.0.
std::vector<double> default_alpha_grid();

/// costs[s][p]. A problem nobody solved stays in the denominator. When the
/// best cost is exactly 0 the zero-cost solvers get ratio 1 and the rest +inf.
ProfileTable performance_profile(std::vector<std::string> solvers,
                                 const std::vector<std::vector<Cost>>& costs,
                                 std::vector<double> alpha_grid = default_alpha_grid());

}  // namespace cmaopt::bench
