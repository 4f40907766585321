#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cmaopt/bench/checks.hpp"
#include "cmaopt/bench/experiment.hpp"
#include "cmaopt/bench/profile.hpp"
#include "cmaopt/bench/trace_io.hpp"
#include "cmaopt/random.hpp"

namespace cmaopt::bench {
namespace {

namespace fs = std::filesystem;

RunTrace trace_of(std::vector<std::pair<double, double>> f_at_t) {
  RunTrace t;
  std::uint64_t k = 0;
  for (auto [f, s] : f_at_t) {
    IterationRecord r;
    r.k = k++;
    r.f = f;
    r.elapsed = s;
    t.records.push_back(r);
  }
  return t;
}

TEST(SolvedTest, Threshold) {
  EXPECT_TRUE(solved_test(1.5, 10.0, 1.0, 0.1));
  EXPECT_TRUE(solved_test(1.9, 10.0, 1.0, 0.1));
  EXPECT_FALSE(solved_test(2.0, 10.0, 1.0, 0.1));
  EXPECT_FALSE(solved_test(10.0, 10.0, 1.0, 0.5));
  EXPECT_THROW(solved_test(1.0, 0.5, 1.0, 0.1), std::invalid_argument);
}

TEST(TimeToSolve, FirstPassingRecord) {
  const auto t = trace_of({{10, 0}, {3, 1}, {1.5, 2}, {1.1, 3}});
  EXPECT_EQ(time_to_solve(t, 10, 1, 0.1), 2.0);
  EXPECT_FALSE(time_to_solve(t, 10, 1, 0.001).has_value());
  EXPECT_EQ(time_to_solve(trace_of({{1, 0}}), 1, 1, 0.1), 0.0);
  EXPECT_EQ(best_value(t), 1.1);
}

TEST(Profile, HandExample) {
  const auto table = performance_profile({"s1", "s2"}, {{2.0, 6.0}, {4.0, 3.0}});
  EXPECT_EQ(table.ratios[0], (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(table.ratios[1], (std::vector<double>{2.0, 1.0}));
  EXPECT_EQ(table.rho_at(0, 1.0), 0.5);
  EXPECT_EQ(table.rho_at(1, 1.0), 0.5);
  EXPECT_EQ(table.rho_at(0, 2.0), 1.0);
  EXPECT_EQ(table.rho_at(1, 2.0), 1.0);
  EXPECT_EQ(table.rho[0].front(), 0.5);
  EXPECT_EQ(table.rho[0][10], 1.0);  // alpha = 2.0 on the default grid
}

TEST(Profile, SingleSolverAndUnsolved) {
  const auto one = performance_profile({"a"}, {{1.0, 5.0, 0.5}});
  for (double r : one.rho[0]) EXPECT_EQ(r, 1.0);
  const auto none = performance_profile({"a", "b"}, {{1.0, 2.0}, {Cost{}, Cost{}}});
  for (double r : none.rho[1]) EXPECT_EQ(r, 0.0);
  EXPECT_TRUE(std::isinf(none.ratios[1][0]));
}

TEST(Profile, ZeroBestCost) {
  const auto t = performance_profile({"a", "b"}, {{0.0}, {1.0}});
  EXPECT_EQ(t.ratios[0][0], 1.0);
  EXPECT_TRUE(std::isinf(t.ratios[1][0]));
}

TEST(Profile, EmptyProblemSet) {
  EXPECT_THROW(performance_profile({"a"}, {{}}), std::invalid_argument);
}

TEST(Profile, GridIsOneToTen) {
  const auto g = default_alpha_grid();
  ASSERT_EQ(g.size(), 91u);
  EXPECT_EQ(g.front(), 1.0);
  EXPECT_DOUBLE_EQ(g.back(), 10.0);
}

TEST(TraceIo, RoundTrip) {
  RunTrace t;
  for (int k = 0; k < 4; ++k) {
    IterationRecord r;
    r.k = static_cast<std::uint64_t>(k);
    r.f = 1.0 / (3.0 + k);
    r.zeta = 0.5 * std::pow(0.5, k);
    r.alpha = k == 2 ? 0.0 : 0.1 * k;
    r.direction_norm = std::sqrt(2.0 + k);
    r.branch = k == 0 ? Branch::Initial : Branch::LSKeepZeta;
    r.probes = k;
    r.counters = {static_cast<std::uint64_t>(k), 7u * k, 11u * k};
    r.epochs = static_cast<std::uint64_t>(k);
    r.elapsed = 1e-3 * k;
    t.records.push_back(r);
  }
  std::stringstream ss;
  write_trace(ss, t);
  const RunTrace back = read_trace(ss);
  ASSERT_EQ(back.records.size(), t.records.size());
  for (std::size_t i = 0; i < t.records.size(); ++i) EXPECT_EQ(back.records[i], t.records[i]);
}

TEST(TraceIo, KeysPerLine) {
  RunTrace t = trace_of({{2.0, 0.0}});
  std::stringstream ss;
  write_trace(ss, t);
  const std::string line = ss.str();
  for (const char* key : {"\"k\"", "\"f\"", "\"zeta\"", "\"alpha\"", "\"branch\"", "\"evals\"", "\"t\""})
    EXPECT_NE(line.find(key), std::string::npos) << key;
  EXPECT_EQ(std::count(line.begin(), line.end(), '\n'), 1);
}

TEST(TraceIo, MissingFileReportsPath) {
  try {
    parse_trace("/nonexistent/dir/x.jsonl");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.path(), fs::path("/nonexistent/dir/x.jsonl"));
  }
}

ExperimentPlan small_plan() {
  ExperimentPlan plan;
  ProblemSpec p;
  p.id = "quad";
  p.quadratic = QuadraticSpec{4, 6, 3};
  plan.problems.push_back(p);
  for (auto kind : {SolverKind::CMA, SolverKind::NMCMA, SolverKind::IG})
    plan.solvers.push_back({std::string(to_string(kind)), kind, {}});
  plan.starts_per_problem = 2;
  plan.budget_seconds.reset();
  plan.budget_epochs = 50;
  plan.master_seed = 12;
  return plan;
}

TEST(RunMatrix, CountsTracesAndProblems) {
  const auto result = run_matrix(small_plan());
  EXPECT_EQ(result.runs.size(), 6u);
  for (const auto& r : result.runs) {
    EXPECT_FALSE(r.error.has_value());
    EXPECT_EQ(r.trace.records.size(), 51u);
  }
  ASSERT_EQ(result.analysis.profiles.size(), kDefaultTaus.size());
  for (const auto& [tau, table] : result.analysis.profiles) {
    EXPECT_EQ(table.num_problems, 2u);
    EXPECT_EQ(table.solvers.size(), 3u);
  }
  EXPECT_EQ(result.analysis.solved.size(), 6u);
}

TEST(RunMatrix, SharedStartAcrossSolvers) {
  const auto result = run_matrix(small_plan());
  for (const auto& a : result.runs)
    for (const auto& b : result.runs)
      if (a.start == b.start && a.solver_id != "IG" && b.solver_id != "IG")
        EXPECT_EQ(a.trace.records.front().f, b.trace.records.front().f);
}

TEST(RunMatrix, ZeroStartsIsEmpty) {
  auto plan = small_plan();
  plan.starts_per_problem = 0;
  const auto result = run_matrix(plan);
  EXPECT_TRUE(result.runs.empty());
  EXPECT_TRUE(result.analysis.solved.empty());
}

TEST(RunMatrix, DeterministicUnderEpochBudget) {
  auto plan = small_plan();
  plan.workers = 3;
  const auto a = run_matrix(plan), b = run_matrix(small_plan());
  ASSERT_EQ(a.analysis.solved.size(), b.analysis.solved.size());
  for (std::size_t i = 0; i < a.analysis.solved.size(); ++i) {
    EXPECT_EQ(a.analysis.solved[i].f_best, b.analysis.solved[i].f_best);
    EXPECT_EQ(a.analysis.solved[i].fL, b.analysis.solved[i].fL);
  }
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    ASSERT_EQ(a.runs[i].trace.records.size(), b.runs[i].trace.records.size());
    for (std::size_t j = 0; j < a.runs[i].trace.records.size(); ++j) {
      auto x = a.runs[i].trace.records[j], y = b.runs[i].trace.records[j];
      x.elapsed = y.elapsed = 0.0;
      EXPECT_EQ(x, y);
    }
  }
}

TEST(Emit, ResultsAndReload) {
  const fs::path dir = fs::path(CMAOPT_TEST_TMP) / "emit";
  fs::remove_all(dir);
  const auto result = run_matrix(small_plan());
  emit_results(result, dir);
  EXPECT_TRUE(fs::exists(dir / "runs.csv"));
  EXPECT_TRUE(fs::exists(dir / "solved.csv"));
  EXPECT_TRUE(fs::exists(dir / "traces" / "quad__CMA__start1.jsonl"));

  const auto runs = load_runs(dir / "traces");
  ASSERT_EQ(runs.size(), 6u);
  const auto again = analyze(runs, kDefaultTaus);
  for (const auto& [tau, table] : result.analysis.profiles) {
    const auto& other = again.profiles.at(tau);
    for (std::size_t s = 0; s < table.solvers.size(); ++s) {
      const auto it = std::find(other.solvers.begin(), other.solvers.end(), table.solvers[s]);
      ASSERT_NE(it, other.solvers.end());
      EXPECT_EQ(table.rho[s], other.rho[static_cast<std::size_t>(it - other.solvers.begin())]);
    }
  }

  std::ifstream csv(dir / "profile_tau1e-01.csv");
  ASSERT_TRUE(csv.good());
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_EQ(header, "alpha,CMA,NMCMA,IG");
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 3);
  EXPECT_TRUE(fs::exists(dir / "profile_tau1e-01.dat"));
}

TEST(Plan, ParsesJson) {
  const auto plan = parse_plan(R"({
    "problems": [{"id": "q", "type": "quadratic", "n": 3, "P": 4, "seed": 2, "grad_tol": 1e-6},
                 {"id": "m", "type": "mlp", "L": 2, "N": 3, "rho": 1e-6, "batch_size": 2,
                  "data": {"synthetic": {"count": 8, "inputs": 2, "outputs": 1, "seed": 1}}}],
    "solvers": [{"id": "c", "kind": "CMA", "zeta0": 0.25, "M": 3, "permutation": "reshuffle"},
                {"kind": "IG", "epsilon": 0.01}],
    "starts_per_problem": 3, "budget_epochs": 10, "budget_seconds": null, "master_seed": 5
  })");
  ASSERT_EQ(plan.problems.size(), 2u);
  EXPECT_EQ(plan.problems[0].quadratic->components, 4u);
  EXPECT_EQ(*plan.problems[0].grad_tol, 1e-6);
  EXPECT_EQ(plan.problems[1].mlp->synthetic->count, 8u);
  EXPECT_EQ(plan.solvers[0].config.zeta0, 0.25);
  EXPECT_EQ(plan.solvers[0].config.memory, 3u);
  EXPECT_EQ(plan.solvers[0].config.permutation.kind, PermutationKind::Reshuffle);
  EXPECT_EQ(plan.solvers[1].id, "IG");
  EXPECT_EQ(plan.solvers[1].config.epsilon_ig, 0.01);
  EXPECT_FALSE(plan.budget_seconds.has_value());
  EXPECT_EQ(*plan.budget_epochs, 10u);
  EXPECT_EQ(plan.master_seed, 5u);
}

TEST(Plan, RejectsBadInput) {
  EXPECT_THROW(parse_plan("{"), ConfigError);
  EXPECT_THROW(parse_plan(R"({"problems": [], "solvers": [], "budget_epochs": 1, "extra": 1})"), ConfigError);
  EXPECT_THROW(parse_plan(R"({"problems": [{"id": "a__b", "type": "quadratic"}],
                               "solvers": [{"kind": "CMA"}], "budget_epochs": 1})"), ConfigError);
  EXPECT_THROW(parse_plan(R"({"problems": [{"id": "q", "type": "quadratic"}],
                               "solvers": [{"kind": "SGD"}], "budget_epochs": 1})"), ConfigError);
  EXPECT_THROW(parse_plan(R"({"problems": [{"id": "q", "type": "quadratic"}],
                               "solvers": [{"kind": "CMA"}], "budget_seconds": null})"), ConfigError);
}

TEST(Seeds, KeyedByProblemAndStart) {
  EXPECT_EQ(start_seed(1, "a", 0), start_seed(1, "a", 0));
  EXPECT_NE(start_seed(1, "a", 0), start_seed(1, "a", 1));
  EXPECT_NE(start_seed(1, "a", 0), start_seed(1, "b", 0));
  EXPECT_NE(start_seed(1, "a", 0), start_seed(2, "a", 0));
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Checks, AllInvariantsPass) {
  for (const auto& r : run_invariant_checks(1)) EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
}

}  // namespace
}  // namespace cmaopt::bench
