#include "cmaopt/solvers.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

namespace cmaopt {

namespace {

constexpr std::array<std::pair<SolverKind, std::string_view>, 3> kSolverNames{{
    {SolverKind::CMA, "CMA"},
    {SolverKind::NMCMA, "NMCMA"},
    {SolverKind::IG, "IG"},
}};

constexpr std::array<std::pair<Branch, std::string_view>, 9> kBranchNames{{
    {Branch::Initial, "Initial"},
    {Branch::WatchdogAccept, "WatchdogAccept"},
    {Branch::SmallDirectionAccept, "SmallDirectionAccept"},
    {Branch::SmallDirectionRestart, "SmallDirectionRestart"},
    {Branch::LSExtrapolate, "LSExtrapolate"},
    {Branch::LSFallbackAccept, "LSFallbackAccept"},
    {Branch::LSRestart, "LSRestart"},
    {Branch::LSKeepZeta, "LSKeepZeta"},
    {Branch::IncrementalStep, "IncrementalStep"},
}};

}  // namespace

std::string_view to_string(SolverKind kind) {
  for (const auto& [k, name] : kSolverNames)
    if (k == kind) return name;
  return "unknown";
}

SolverKind parse_solver_kind(std::string_view name) {
  for (const auto& [k, n] : kSolverNames)
    if (n == name) return k;
  throw std::invalid_argument("unknown solver kind '" + std::string(name) + "'");
}

std::string_view to_string(Branch branch) {
  for (const auto& [b, name] : kBranchNames)
    if (b == branch) return name;
  return "unknown";
}

Branch parse_branch(std::string_view name) {
  for (const auto& [b, n] : kBranchNames)
    if (n == name) return b;
  throw std::invalid_argument("unknown branch '" + std::string(name) + "'");
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::None:
      return "none";
    case StopReason::EpochBudget:
      return "epoch_budget";
    case StopReason::TimeBudget:
      return "time_budget";
    case StopReason::StepsizeFloor:
      return "stepsize_floor";
    case StopReason::GradientTolerance:
      return "gradient_tolerance";
    case StopReason::Error:
      return "error";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(std::string("solver config: ") + msg);
  };
  require(zeta0 > 0.0, "zeta0 must be positive");
  require(theta > 0.0 && theta < 1.0, "theta must be in (0,1)");
  require(tau > 0.0, "tau must be positive");
  require(gamma > 0.0 && gamma < 1.0, "gamma must be in (0,1)");
  require(delta > 0.0 && delta < 1.0, "delta must be in (0,1)");
  require(epsilon_ig > 0.0, "epsilon_ig must be positive");
  require(zeta_min > 0.0, "zeta_min must be positive");
  require(alpha_cap >= 1.0, "alpha_cap must be >= 1");
  require(!budget_seconds || *budget_seconds >= 0.0, "budget_seconds must be >= 0");
  require(!grad_tol || *grad_tol >= 0.0, "grad_tol must be >= 0");
}

SolverState::SolverState(const FiniteSumOracle& oracle, ParameterVector w0, double zeta0,
                         std::size_t memory_)
    : w(std::move(w0)), zeta(zeta0), memory(memory_), eval(oracle) {
  if (static_cast<std::size_t>(w.size()) != oracle.dim()) {
    throw std::invalid_argument("initial point has wrong dimension");
  }
}

void SolverState::set_initial_value(double f0) {
  f = f0;
  f_w0 = f0;
  f_history.assign(1, f0);
}

void SolverState::push_value(double f_next) {
  f = f_next;
  f_history.push_back(f_next);
  while (f_history.size() > memory + 1) f_history.pop_front();
}

double reference_value(const SolverState& state) {
  return *std::max_element(state.f_history.begin(), state.f_history.end());
}

namespace {

ValueFn counted_value(SolverState& state) {
  return [&state](const ParameterVector& x) { return state.eval.full_value(x); };
}

void finish_iteration(SolverState& state, Branch branch, double alpha, double next_zeta,
                      ParameterVector next_w, double next_f, double dnorm, int probes) {
  state.last_branch = branch;
  state.last_alpha = alpha;
  state.last_direction_norm = dnorm;
  state.last_probes = probes;
  state.w = std::move(next_w);
  state.zeta = next_zeta;
  state.push_value(next_f);
  ++state.k;
}

}  // namespace

void cma_iterate(SolverState& state, const SolverConfig& config) {
  const double zeta = state.zeta;
  const Permutation perm =
      make_permutation(config.permutation, state.eval.num_components(), state.k);
  InnerCycleResult cycle = inner_cycle(state.eval, state.w, zeta, perm);
  const double f_trial = state.eval.full_value(cycle.w_trial);
  const double dnorm = cycle.direction.norm();

  if (f_trial <= state.f - config.gamma * zeta) {
    finish_iteration(state, Branch::WatchdogAccept, zeta, zeta, std::move(cycle.w_trial), f_trial,
                     dnorm, 0);
    return;
  }

  const double shrunk = config.theta * zeta;
  const bool inside_level_set = f_trial <= state.f_w0;

  if (dnorm <= config.tau * zeta) {
    if (inside_level_set) {
      finish_iteration(state, Branch::SmallDirectionAccept, zeta, shrunk,
                       std::move(cycle.w_trial), f_trial, dnorm, 0);
    } else {
      finish_iteration(state, Branch::SmallDirectionRestart, 0.0, shrunk, state.w, state.f, dnorm,
                       0);
    }
    return;
  }

  const LinesearchOutcome ls = edfl(counted_value(state), state.w, cycle.direction, zeta,
                                    config.linesearch(), state.f, f_trial);
  const double dd = cycle.direction.squaredNorm();

  if (ls.alpha * dd <= config.tau * zeta) {
    if (ls.alpha > 0.0) {
      ParameterVector next = ls.alpha == zeta ? std::move(cycle.w_trial)
                                              : ParameterVector(state.w + ls.alpha * cycle.direction);
      finish_iteration(state, Branch::LSExtrapolate, ls.alpha, shrunk, std::move(next), ls.value,
                       dnorm, ls.probes);
    } else if (inside_level_set) {
      finish_iteration(state, Branch::LSFallbackAccept, zeta, shrunk, std::move(cycle.w_trial),
                       f_trial, dnorm, ls.probes);
    } else {
      finish_iteration(state, Branch::LSRestart, 0.0, shrunk, state.w, state.f, dnorm, ls.probes);
    }
    return;
  }

  // alpha * ||d||^2 > tau * zeta > 0 implies alpha > 0.
  ParameterVector next = ls.alpha == zeta ? std::move(cycle.w_trial)
                                          : ParameterVector(state.w + ls.alpha * cycle.direction);
  finish_iteration(state, Branch::LSKeepZeta, ls.alpha, zeta, std::move(next), ls.value, dnorm,
                   ls.probes);
}

void nmcma_iterate(SolverState& state, const SolverConfig& config) {
  const double zeta = state.zeta;
  const double reference = reference_value(state);
  state.last_reference = reference;

  const Permutation perm =
      make_permutation(config.permutation, state.eval.num_components(), state.k);
  InnerCycleResult cycle = inner_cycle(state.eval, state.w, zeta, perm);
  const double f_trial = state.eval.full_value(cycle.w_trial);
  const double dnorm = cycle.direction.norm();

  if (f_trial <= reference - config.gamma * std::max(zeta, zeta * dnorm)) {
    finish_iteration(state, Branch::WatchdogAccept, zeta, zeta, std::move(cycle.w_trial), f_trial,
                     dnorm, 0);
    return;
  }

  const double shrunk = config.theta * zeta;
  if (dnorm <= config.tau * zeta) {
    finish_iteration(state, Branch::SmallDirectionRestart, 0.0, shrunk, state.w, state.f, dnorm, 0);
    return;
  }

  const LinesearchOutcome ls = nmedfl(counted_value(state), reference, state.w, cycle.direction,
                                      zeta, config.linesearch(), f_trial);
  const double alpha = ls.alpha;
  const double dd = cycle.direction.squaredNorm();
  const bool shrink = alpha * alpha * dd <= config.tau * zeta;

  if (alpha == 0.0) {
    // Only reachable with shrink == true.
    finish_iteration(state, Branch::LSRestart, 0.0, shrunk, state.w, state.f, dnorm, ls.probes);
    return;
  }
  ParameterVector next = alpha == zeta ? std::move(cycle.w_trial)
                                       : ParameterVector(state.w + alpha * cycle.direction);
  finish_iteration(state, shrink ? Branch::LSExtrapolate : Branch::LSKeepZeta, alpha,
                   shrink ? shrunk : zeta, std::move(next), ls.value, dnorm, ls.probes);
}

void ig_iterate(SolverState& state, const SolverConfig& config) {
  const double zeta = state.zeta;
  const Permutation perm =
      make_permutation(config.permutation, state.eval.num_components(), state.k);
  InnerCycleResult cycle = inner_cycle(state.eval, state.w, zeta, perm);
  const double dnorm = cycle.direction.norm();
  finish_iteration(state, Branch::IncrementalStep, zeta, zeta * (1.0 - config.epsilon_ig * zeta),
                   std::move(cycle.w_trial), std::numeric_limits<double>::quiet_NaN(), dnorm, 0);
}

TraceSummary RunTrace::summary() const {
  TraceSummary s;
  if (records.empty()) return s;
  const IterationRecord& last = records.back();
  s.final_f = last.f;
  s.final_zeta = last.zeta;
  s.iterations = records.size() - 1;
  s.full_value_evals = last.counters.full_value_evals;
  s.epochs = last.epochs;
  s.elapsed = last.elapsed;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const IterationRecord& r = records[i];
    if (r.branch == Branch::WatchdogAccept) ++s.acceptances;
    if (r.alpha == 0.0) ++s.restarts;
    if (r.branch == Branch::LSExtrapolate || r.branch == Branch::LSFallbackAccept ||
        r.branch == Branch::LSRestart || r.branch == Branch::LSKeepZeta) {
      ++s.ls_activations;
    }
  }
  if (s.iterations > 0) {
    const auto n = static_cast<double>(s.iterations);
    s.mean_full_evals_per_iteration =
        static_cast<double>(last.counters.full_value_evals - records.front().counters.full_value_evals) / n;
    s.acceptance_fraction = static_cast<double>(s.acceptances) / n;
  }
  return s;
}

RunTrace run(SolverKind kind, const FiniteSumOracle& oracle, const ParameterVector& w0,
             const SolverConfig& config) {
  config.validate();
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  RunTrace trace;
  trace.solver = kind;
  SolverState state(oracle, w0, config.zeta0, config.memory);

  auto record = [&](double f) {
    IterationRecord r;
    r.k = state.k;
    r.f = f;
    r.zeta = state.zeta;
    r.alpha = state.last_alpha;
    r.direction_norm = state.last_direction_norm;
    r.branch = state.last_branch;
    r.probes = state.last_probes;
    r.counters = state.eval.counters();
    r.epochs = state.eval.epochs();
    r.elapsed = elapsed();
    trace.records.push_back(r);
  };
  auto fail = [&](const std::exception& e) -> RunFailure {
    trace.stop = StopReason::Error;
    trace.error = e.what();
    return RunFailure(e.what(), trace);
  };

  try {
    if (kind == SolverKind::IG) {
      if (!all_finite(w0)) throw NonFiniteValue("initial point is not finite", -1);
      record(oracle.value(w0));
    } else {
      state.set_initial_value(state.eval.full_value(state.w));
      record(state.f);
    }
  } catch (const std::exception& e) {
    throw fail(e);
  }

  for (;;) {
    if (config.max_epochs && state.k >= *config.max_epochs) {
      trace.stop = StopReason::EpochBudget;
      break;
    }
    if (config.budget_seconds && elapsed() >= *config.budget_seconds) {
      trace.stop = StopReason::TimeBudget;
      break;
    }
    if (state.zeta < config.zeta_min) {
      trace.stop = StopReason::StepsizeFloor;
      break;
    }
    if (config.grad_tol && oracle.gradient(state.w).norm() <= *config.grad_tol) {
      trace.stop = StopReason::GradientTolerance;
      break;
    }

    try {
      switch (kind) {
        case SolverKind::CMA:
          cma_iterate(state, config);
          record(state.f);
          break;
        case SolverKind::NMCMA:
          nmcma_iterate(state, config);
          record(state.f);
          break;
        case SolverKind::IG: {
          ig_iterate(state, config);
          const double f = oracle.value(state.w);
          if (!std::isfinite(f)) throw NonFiniteValue("non-finite full objective value", -1);
          record(f);
          break;
        }
      }
    } catch (const std::exception& e) {
      throw fail(e);
    }
  }
  return trace;
}

}  // namespace cmaopt
