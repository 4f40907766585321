#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cmaopt/inner_cycle.hpp"
#include "cmaopt/linesearch.hpp"
#include "cmaopt/problem.hpp"

namespace cmaopt {

enum class SolverKind { CMA, NMCMA, IG };

std::string_view to_string(SolverKind kind);
SolverKind parse_solver_kind(std::string_view name);

/// Which rule produced w^{k+1} and zeta^{k+1}.
enum class Branch {
  Initial,                ///< record of the starting point
  WatchdogAccept,         ///< trial point accepted, zeta kept
  SmallDirectionAccept,   ///< ||d|| <= tau zeta, zeta shrinks, trial point kept inside L(w0)
  SmallDirectionRestart,  ///< ||d|| <= tau zeta, zeta shrinks, alpha = 0
  LSExtrapolate,          ///< linesearch alpha > 0 but short, zeta shrinks
  LSFallbackAccept,       ///< linesearch failed, trial point kept inside L(w0), zeta shrinks
  LSRestart,              ///< linesearch failed, alpha = 0, zeta shrinks
  LSKeepZeta,             ///< linesearch step long enough, zeta kept
  IncrementalStep,        ///< plain IG epoch with decaying zeta
};

std::string_view to_string(Branch branch);
Branch parse_branch(std::string_view name);

struct SolverConfig {
  double zeta0 = 0.5;
  double theta = 0.5;
  double tau = 1e-2;
  double gamma = 1e-6;
  double delta = 0.5;
  std::size_t memory = 5;  ///< M, nonmonotone window
  double epsilon_ig = 1e-3;
  double zeta_min = 1e-12;
  double alpha_cap = 1e16;

  std::optional<double> budget_seconds;
  std::optional<std::uint64_t> max_epochs;
  /// Stop once ||grad f(w^k)|| <= grad_tol. Checked with uncounted evaluations.
  std::optional<double> grad_tol;

  PermutationStrategy permutation;

  void validate() const;
  LinesearchParams linesearch() const { return {gamma, delta, alpha_cap}; }
};

struct SolverState {
  SolverState(const FiniteSumOracle& oracle, ParameterVector w0, double zeta0,
              std::size_t memory);

  std::uint64_t k = 0;
  ParameterVector w;
  /// f(w^k). Not maintained by IG, which never evaluates f.
  double f = 0.0;
  double zeta;
  double f_w0 = 0.0;
  /// f(w^{k-j}) for j = min(k, M)..0, oldest first.
  std::deque<double> f_history;
  std::size_t memory;
  Evaluator eval;

  Branch last_branch = Branch::Initial;
  double last_alpha = 0.0;
  double last_direction_norm = 0.0;
  int last_probes = 0;
  /// R^k used by the last NMCMA iteration.
  double last_reference = 0.0;

  /// Sets f(w^0) and seeds the history with it.
  void set_initial_value(double f0);
  void push_value(double f_next);
};

/// R^k = max over the stored window.
double reference_value(const SolverState& state);

void cma_iterate(SolverState& state, const SolverConfig& config);
void nmcma_iterate(SolverState& state, const SolverConfig& config);
void ig_iterate(SolverState& state, const SolverConfig& config);

enum class StopReason { None, EpochBudget, TimeBudget, StepsizeFloor, GradientTolerance, Error };

std::string_view to_string(StopReason reason);

struct IterationRecord {
  std::uint64_t k = 0;
  double f = 0.0;
  double zeta = 0.0;
  double alpha = 0.0;
  double direction_norm = 0.0;
  Branch branch = Branch::Initial;
  int probes = 0;
  EvalCounters counters;
  std::uint64_t epochs = 0;
  double elapsed = 0.0;

  bool operator==(const IterationRecord&) const = default;
};

struct TraceSummary {
  double final_f = 0.0;
  double final_zeta = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t acceptances = 0;      ///< WatchdogAccept
  std::uint64_t restarts = 0;         ///< iterations with alpha = 0
  std::uint64_t ls_activations = 0;   ///< iterations that invoked a linesearch
  std::uint64_t full_value_evals = 0;
  std::uint64_t epochs = 0;
  double elapsed = 0.0;
  double mean_full_evals_per_iteration = 0.0;
  double acceptance_fraction = 0.0;
};

struct RunTrace {
  SolverKind solver = SolverKind::CMA;
  std::vector<IterationRecord> records;
  StopReason stop = StopReason::None;
  std::optional<std::string> error;

  TraceSummary summary() const;
};

/// A run aborted by an oracle or linesearch error. Carries the trace up to the failure.
class RunFailure : public std::runtime_error {
 public:
  RunFailure(const std::string& what, RunTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const RunTrace& trace() const { return trace_; }

 private:
  RunTrace trace_;
};

/// Iterates until the epoch budget, the wall-clock budget, zeta < zeta_min or
/// the gradient tolerance is hit. Budgets are checked between epochs only.
/// For IG the recorded f values come from uncounted monitoring evaluations.
RunTrace run(SolverKind kind, const FiniteSumOracle& oracle, const ParameterVector& w0,
             const SolverConfig& config);

}  // namespace cmaopt
