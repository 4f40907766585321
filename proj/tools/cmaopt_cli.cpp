// cmaopt: run solver benchmark matrices, rebuild performance profiles from
// saved traces, and run the built-in invariant checks.
//
//   cmaopt run --plan plan.json --out results/ [--workers N] [--seed S]
//              [--budget-seconds T] [--budget-epochs E]
//   cmaopt profile --in results/traces --out profile.csv [--tau 0.1 --tau 0.01]
//   cmaopt check [--seed S]
//
// Exit codes: 0 success, 1 run failure, 2 configuration error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cmaopt/bench/checks.hpp"
#include "cmaopt/bench/experiment.hpp"
#include "cmaopt/bench/trace_io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRunFailure = 1;
constexpr int kConfigError = 2;

namespace fs = std::filesystem;
using namespace cmaopt;

struct RunArgs {
  fs::path plan;
  fs::path out;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
  std::optional<double> budget_seconds;
  std::optional<std::uint64_t> budget_epochs;
};

int do_run(const RunArgs& args) {
  bench::ExperimentPlan plan;
  try {
    plan = bench::load_plan(args.plan);
    if (args.workers) plan.workers = *args.workers;
    if (args.seed) plan.master_seed = *args.seed;
    if (args.budget_seconds) plan.budget_seconds = *args.budget_seconds;
    if (args.budget_epochs) plan.budget_epochs = *args.budget_epochs;
    if (plan.workers == 0) throw bench::ConfigError("--workers must be >= 1");
    // Build once up front so data and shape errors surface as config errors.
    for (const auto& p : plan.problems) bench::build_problem(p);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  std::size_t failures = 0;
  try {
    const bench::MatrixResult result = bench::run_matrix(plan);
    bench::emit_results(result, args.out);
    for (const auto& r : result.runs) {
      const auto s = r.trace.summary();
      std::cout << r.problem_id << ' ' << r.solver_id << " start" << r.start << ": "
                << s.iterations << " iterations, f = " << s.final_f
                << ", zeta = " << s.final_zeta << ", stop = " << to_string(r.trace.stop);
      if (r.error) {
        ++failures;
        std::cout << ", error: " << *r.error;
      }
      std::cout << '\n';
    }
    std::cout << "wrote " << result.runs.size() << " traces to " << (args.out / "traces") << '\n';
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kRunFailure;
  }
  return failures == 0 ? kOk : kRunFailure;
}

int do_profile(const fs::path& in, const fs::path& out, std::vector<double> taus) {
  if (taus.empty()) taus = bench::kDefaultTaus;
  for (double t : taus) {
    if (!(t >= 0.0 && t < 1.0)) {
      std::cerr << "config error: tau must lie in [0, 1)\n";
      return kConfigError;
    }
  }
  try {
    const auto runs = bench::load_runs(in);
    if (runs.empty()) {
      std::cerr << "config error: no traces found in " << in << '\n';
      return kConfigError;
    }
    const auto analysis = bench::analyze(runs, taus);
    for (const auto& [tau, table] : analysis.profiles) {
      fs::path target = out;
      if (analysis.profiles.size() > 1) {
        char tag[32];
        std::snprintf(tag, sizeof tag, "_tau%.0e", tau);
        target = out.parent_path() / (out.stem().string() + tag + out.extension().string());
      }
      if (target.has_parent_path()) fs::create_directories(target.parent_path());
      bench::emit_profile_csv(table, target);
      fs::path columns = target;
      bench::emit_profile_columns(table, columns.replace_extension(".dat"));
      std::cout << "tau=" << tau << ": " << table.num_problems << " problems -> " << target << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "profile failed: " << e.what() << '\n';
    return kRunFailure;
  }
  return kOk;
}

int do_check(std::uint64_t seed) {
  bool ok = true;
  for (const auto& r : bench::run_invariant_checks(seed)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
    ok = ok && r.passed;
  }
  return ok ? kOk : kRunFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Controlled mini-batch gradient solvers: experiments, profiles and checks"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a solver x problem x start matrix");
  run->add_option("--plan", run_args.plan, "JSON experiment plan")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_args.out, "Output directory")->required();
  run->add_option("--workers", run_args.workers, "Concurrent runs");
  run->add_option("--seed", run_args.seed, "Master seed (overrides the plan)");
  run->add_option("--budget-seconds", run_args.budget_seconds, "Wall-clock budget per run");
  run->add_option("--budget-epochs", run_args.budget_epochs, "Epoch budget per run");

  fs::path profile_in, profile_out;
  std::vector<double> taus;
  auto* profile = app.add_subcommand("profile", "Performance profiles from a trace directory");
  profile->add_option("--in", profile_in, "Directory of .jsonl traces")->required();
  profile->add_option("--out", profile_out, "Output CSV")->required();
  profile->add_option("--tau", taus, "Solved-test tolerance levels (repeatable)");

  std::uint64_t check_seed = 0;
  auto* check = app.add_subcommand("check", "Run invariant checks on built-in problems");
  check->add_option("--seed", check_seed, "Seed for random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (*run) return do_run(run_args);
  if (*profile) return do_profile(profile_in, profile_out, taus);
  return do_check(check_seed);
}
