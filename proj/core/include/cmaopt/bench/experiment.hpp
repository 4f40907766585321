#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmaopt/bench/profile.hpp"
#include "cmaopt/problem.hpp"
#include "cmaopt/problems/mlp.hpp"
#include "cmaopt/solvers.hpp"

namespace cmaopt::bench {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadraticSpec {
  std::size_t n = 10;
  std::size_t components = 20;
  std::uint64_t seed = 0;
};

struct SyntheticDataSpec {
  std::size_t count = 100;
  std::size_t inputs = 5;
  std::size_t outputs = 1;
  std::uint64_t seed = 0;
};

struct CsvDataSpec {
  std::filesystem::path path;
  std::vector<std::string> targets;
};

struct MlpSpec {
  std::size_t hidden_layers = 1;
  std::size_t neurons = 10;
  std::optional<SyntheticDataSpec> synthetic;
  std::optional<CsvDataSpec> csv;
  double rho = 1e-6;
  std::size_t batch_size = 1;
};

struct ProblemSpec {
  std::string id;
  std::optional<QuadraticSpec> quadratic;
  std::optional<MlpSpec> mlp;
  std::optional<double> grad_tol;
};

struct SolverSpec {
  std::string id;
  SolverKind kind = SolverKind::CMA;
  SolverConfig config;
};

struct ExperimentPlan {
  std::vector<ProblemSpec> problems;
  std::vector<SolverSpec> solvers;
  std::size_t starts_per_problem = 5;
  std::optional<double> budget_seconds = 100.0;
  std::optional<std::uint64_t> budget_epochs;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
  std::vector<double> taus = kDefaultTaus;
};

/// A built problem ready to run.
struct ProblemInstance {
  std::string id;
  std::shared_ptr<const FiniteSumOracle> oracle;
  /// Seeded starting point.
  std::function<ParameterVector(std::uint64_t)> initial_point;
  std::optional<double> grad_tol;
};

ProblemInstance build_problem(const ProblemSpec& spec);

/// 64-bit FNV-1a, used to key seeds by problem and solver id.
std::uint64_t fnv1a(const std::string& text);

/// Seed of the shared initial point for (problem, start).
std::uint64_t start_seed(std::uint64_t master_seed, const std::string& problem_id, std::size_t start);

/// Reads a JSON plan. Keys mirror the field names above; solver parameters use
/// zeta0/theta/tau/gamma/delta/M/epsilon/zeta_min/permutation.
ExperimentPlan load_plan(const std::filesystem::path& path);
ExperimentPlan parse_plan(const std::string& text);

struct RunResult {
  std::string problem_id;
  std::string solver_id;
  std::size_t start = 0;
  RunTrace trace;
  std::optional<std::string> error;
};

struct SolvedRecord {
  std::string problem_id;
  std::string solver_id;
  std::size_t start = 0;
  double f_best = 0.0;
  double f0 = 0.0;
  double fL = 0.0;
  std::map<double, Cost> time_to_solve;
};

struct Analysis {
  std::vector<SolvedRecord> solved;
  /// Profile per tau; each (problem, start) pair is one profile problem.
  std::map<double, ProfileTable> profiles;
};

/// fL per problem id is the best value over all solvers and starts.
Analysis analyze(const std::vector<RunResult>& runs, const std::vector<double>& taus,
                 const std::vector<double>& alpha_grid = default_alpha_grid());

struct MatrixResult {
  std::vector<RunResult> runs;
  Analysis analysis;
};

/// Runs every (problem, start, solver) triple, up to plan.workers at a time.
/// Failures are recorded per run and do not stop the matrix.
MatrixResult run_matrix(const ExperimentPlan& plan);

/// Writes traces/<problem>__<solver>__start<k>.jsonl, runs.csv, solved.csv and
/// profile_tau<tau>.{csv,dat} under `dir`.
void emit_results(const MatrixResult& result, const std::filesystem::path& dir);
void emit_analysis(const Analysis& analysis, const std::filesystem::path& dir);

/// Inverse of the trace naming scheme; reads every *.jsonl under `dir`.
std::vector<RunResult> load_runs(const std::filesystem::path& dir);

}  // namespace cmaopt::bench
