#include "cmaopt/bench/profile.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace cmaopt::bench {

bool solved_test(double f, double f0, double fL, double tau) {
  if (f0 < fL) throw std::invalid_argument("solved_test: f0 must not be below fL");
  return f <= fL + tau * (f0 - fL);
}

Cost time_to_solve(const RunTrace& trace, double f0, double fL, double tau) {
  for (const IterationRecord& r : trace.records) {
    if (solved_test(r.f, f0, fL, tau)) return r.elapsed;
  }
  return std::nullopt;
}

double best_value(const RunTrace& trace) {
  double best = std::numeric_limits<double>::infinity();
  for (const IterationRecord& r : trace.records) best = std::min(best, r.f);
  return best;
}

double ProfileTable::rho_at(std::size_t solver, double alpha) const {
  if (num_problems == 0) return 0.0;
  const auto& r = ratios.at(solver);
  const auto hits = std::count_if(r.begin(), r.end(), [alpha](double x) { return x <= alpha; });
  return static_cast<double>(hits) / static_cast<double>(num_problems);
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 10; i <= 100; ++i) grid.push_back(i / 10.0);
  return grid;
}

ProfileTable performance_profile(std::vector<std::string> solvers,
                                 const std::vector<std::vector<Cost>>& costs,
                                 std::vector<double> alpha_grid) {
  if (costs.size() != solvers.size()) {
    throw std::invalid_argument("performance_profile: one cost row per solver required");
  }
  if (solvers.empty() || costs.front().empty()) {
    throw std::invalid_argument("performance_profile: empty problem set");
  }
  const std::size_t num_problems = costs.front().size();
  for (const auto& row : costs) {
    if (row.size() != num_problems) {
      throw std::invalid_argument("performance_profile: ragged cost matrix");
    }
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  ProfileTable table;
  table.solvers = std::move(solvers);
  table.num_problems = num_problems;
  table.alpha_grid = std::move(alpha_grid);
  table.ratios.assign(costs.size(), std::vector<double>(num_problems, kInf));

  for (std::size_t p = 0; p < num_problems; ++p) {
    double best = kInf;
    for (const auto& row : costs)
      if (row[p]) best = std::min(best, *row[p]);
    if (best == kInf) continue;
    for (std::size_t s = 0; s < costs.size(); ++s) {
      const Cost& c = costs[s][p];
      if (!c) continue;
      if (best > 0.0) {
        table.ratios[s][p] = *c / best;
      } else {
        table.ratios[s][p] = *c == 0.0 ? 1.0 : kInf;
      }
    }
  }

  table.rho.resize(costs.size());
  for (std::size_t s = 0; s < costs.size(); ++s) {
    table.rho[s].reserve(table.alpha_grid.size());
    for (double a : table.alpha_grid) table.rho[s].push_back(table.rho_at(s, a));
  }
  return table;
}

}  // namespace cmaopt::bench
