#include "cmaopt/bench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "cmaopt/bench/trace_io.hpp"
#include "cmaopt/problems/quadratic.hpp"
#include "cmaopt/random.hpp"

namespace cmaopt::bench {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t start_seed(std::uint64_t master_seed, const std::string& problem_id, std::size_t start) {
  return derive_seed(master_seed, fnv1a(problem_id), start);
}

ProblemInstance build_problem(const ProblemSpec& spec) {
  ProblemInstance inst;
  inst.id = spec.id;
  inst.grad_tol = spec.grad_tol;
  if (spec.quadratic.has_value() == spec.mlp.has_value()) {
    throw ConfigError("problem '" + spec.id + "' must be exactly one of quadratic or mlp");
  }
  if (spec.quadratic) {
    const QuadraticSpec q = *spec.quadratic;
    inst.oracle = std::make_shared<QuadraticSumProblem>(quadratic_make(q.n, q.components, q.seed));
    inst.initial_point = [n = q.n](std::uint64_t seed) { return random_point(n, seed); };
    return inst;
  }

  const MlpSpec& m = *spec.mlp;
  std::shared_ptr<Dataset> data;
  if (m.synthetic.has_value() == m.csv.has_value()) {
    throw ConfigError("problem '" + spec.id + "' needs exactly one data source");
  }
  if (m.synthetic) {
    const SyntheticDataSpec& s = *m.synthetic;
    data = std::make_shared<Dataset>(synth_data(s.count, s.inputs, s.outputs, s.seed));
  } else {
    data = std::make_shared<Dataset>(load_csv(m.csv->path, m.csv->targets));
  }
  const MLPArchitecture arch{m.hidden_layers, m.neurons, data->input_dim(), data->output_dim()};
  inst.oracle = std::make_shared<MLPObjective>(arch, data, m.rho, m.batch_size);
  inst.initial_point = [arch](std::uint64_t seed) { return init_weights(arch, seed); };
  return inst;
}

namespace {

void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
        allowed.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

SolverSpec parse_solver(const json& j) {
  require_keys(j,
               {"id", "kind", "zeta0", "theta", "tau", "gamma", "delta", "M", "epsilon", "zeta_min",
                "alpha_cap", "permutation"},
               "solver");
  SolverSpec s;
  s.kind = parse_solver_kind(j.at("kind").get<std::string>());
  s.id = j.value("id", std::string(to_string(s.kind)));
  SolverConfig& c = s.config;
  read_opt(j, "zeta0", c.zeta0);
  read_opt(j, "theta", c.theta);
  read_opt(j, "tau", c.tau);
  read_opt(j, "gamma", c.gamma);
  read_opt(j, "delta", c.delta);
  read_opt(j, "M", c.memory);
  read_opt(j, "epsilon", c.epsilon_ig);
  read_opt(j, "zeta_min", c.zeta_min);
  read_opt(j, "alpha_cap", c.alpha_cap);
  if (j.contains("permutation")) {
    c.permutation.kind = parse_permutation_kind(j.at("permutation").get<std::string>());
  }
  c.validate();
  return s;
}

ProblemSpec parse_problem(const json& j, const std::filesystem::path& base_dir) {
  const std::string type = j.at("type").get<std::string>();
  ProblemSpec p;
  p.id = j.at("id").get<std::string>();
  if (p.id.empty() || p.id.find("__") != std::string::npos || p.id.find('/') != std::string::npos) {
    throw ConfigError("problem id '" + p.id + "' must be non-empty without '__' or '/'");
  }
  if (j.contains("grad_tol")) p.grad_tol = j.at("grad_tol").get<double>();
  if (type == "quadratic") {
    require_keys(j, {"id", "type", "n", "P", "seed", "grad_tol"}, "problem '" + p.id + "'");
    QuadraticSpec q;
    read_opt(j, "n", q.n);
    read_opt(j, "P", q.components);
    read_opt(j, "seed", q.seed);
    p.quadratic = q;
  } else if (type == "mlp") {
    require_keys(j, {"id", "type", "L", "N", "rho", "batch_size", "data", "grad_tol"},
                 "problem '" + p.id + "'");
    MlpSpec m;
    read_opt(j, "L", m.hidden_layers);
    read_opt(j, "N", m.neurons);
    read_opt(j, "rho", m.rho);
    read_opt(j, "batch_size", m.batch_size);
    const json& data = j.at("data");
    require_keys(data, {"synthetic", "csv"}, "problem '" + p.id + "' data");
    if (data.contains("synthetic")) {
      const json& s = data.at("synthetic");
      require_keys(s, {"count", "inputs", "outputs", "seed"}, "synthetic data");
      SyntheticDataSpec sd;
      read_opt(s, "count", sd.count);
      read_opt(s, "inputs", sd.inputs);
      read_opt(s, "outputs", sd.outputs);
      read_opt(s, "seed", sd.seed);
      m.synthetic = sd;
    }
    if (data.contains("csv")) {
      const json& c = data.at("csv");
      require_keys(c, {"path", "targets"}, "csv data");
      CsvDataSpec cd;
      cd.path = c.at("path").get<std::string>();
      if (cd.path.is_relative()) cd.path = base_dir / cd.path;
      cd.targets = c.at("targets").get<std::vector<std::string>>();
      m.csv = cd;
    }
    p.mlp = m;
  } else {
    throw ConfigError("problem '" + p.id + "': unknown type '" + type + "'");
  }
  return p;
}

ExperimentPlan parse_plan_json(const json& j, const std::filesystem::path& base_dir) {
  require_keys(j,
               {"problems", "solvers", "starts_per_problem", "budget_seconds", "budget_epochs",
                "master_seed", "workers", "taus"},
               "plan");
  ExperimentPlan plan;
  for (const json& p : j.at("problems")) plan.problems.push_back(parse_problem(p, base_dir));
  for (const json& s : j.at("solvers")) plan.solvers.push_back(parse_solver(s));
  read_opt(j, "starts_per_problem", plan.starts_per_problem);
  read_opt(j, "master_seed", plan.master_seed);
  read_opt(j, "workers", plan.workers);
  read_opt(j, "taus", plan.taus);
  if (j.contains("budget_seconds")) {
    if (j.at("budget_seconds").is_null()) {
      plan.budget_seconds.reset();
    } else {
      plan.budget_seconds = j.at("budget_seconds").get<double>();
    }
  }
  if (j.contains("budget_epochs") && !j.at("budget_epochs").is_null()) {
    plan.budget_epochs = j.at("budget_epochs").get<std::uint64_t>();
  }

  std::set<std::string> ids;
  for (const auto& p : plan.problems)
    if (!ids.insert(p.id).second) throw ConfigError("duplicate problem id '" + p.id + "'");
  ids.clear();
  for (const auto& s : plan.solvers) {
    if (!ids.insert(s.id).second) throw ConfigError("duplicate solver id '" + s.id + "'");
    if (s.id.empty() || s.id.find("__") != std::string::npos || s.id.find('/') != std::string::npos) {
      throw ConfigError("solver id '" + s.id + "' must be non-empty without '__' or '/'");
    }
  }
  if (!plan.budget_seconds && !plan.budget_epochs) {
    throw ConfigError("plan needs budget_seconds or budget_epochs");
  }
  if (plan.workers == 0) throw ConfigError("workers must be >= 1");
  for (double t : plan.taus)
    if (!(t >= 0.0 && t < 1.0)) throw ConfigError("taus must lie in [0, 1)");
  return plan;
}

}  // namespace

ExperimentPlan parse_plan(const std::string& text) {
  try {
    return parse_plan_json(json::parse(text), std::filesystem::current_path());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open plan '" + path.string() + "'");
  try {
    return parse_plan_json(json::parse(in), path.parent_path());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("plan '" + path.string() + "': " + e.what());
  }
}

Analysis analyze(const std::vector<RunResult>& runs, const std::vector<double>& taus,
                 const std::vector<double>& alpha_grid) {
  Analysis out;
  std::map<std::string, double> best_per_problem;
  std::map<std::pair<std::string, std::size_t>, double> f0_per_start;
  std::vector<std::string> solver_ids;
  for (const RunResult& r : runs) {
    if (std::find(solver_ids.begin(), solver_ids.end(), r.solver_id) == solver_ids.end()) {
      solver_ids.push_back(r.solver_id);
    }
    if (r.trace.records.empty()) continue;
    const double best = best_value(r.trace);
    auto [it, inserted] = best_per_problem.try_emplace(r.problem_id, best);
    if (!inserted) it->second = std::min(it->second, best);
    f0_per_start.try_emplace({r.problem_id, r.start}, r.trace.records.front().f);
  }

  std::vector<std::pair<std::string, std::size_t>> pairs;
  for (const auto& [key, _] : f0_per_start) pairs.push_back(key);

  for (const RunResult& r : runs) {
    if (r.trace.records.empty()) continue;
    SolvedRecord rec;
    rec.problem_id = r.problem_id;
    rec.solver_id = r.solver_id;
    rec.start = r.start;
    rec.f_best = best_value(r.trace);
    rec.f0 = f0_per_start.at({r.problem_id, r.start});
    rec.fL = std::min(best_per_problem.at(r.problem_id), rec.f0);
    for (double tau : taus) rec.time_to_solve[tau] = time_to_solve(r.trace, rec.f0, rec.fL, tau);
    out.solved.push_back(std::move(rec));
  }

  if (pairs.empty() || solver_ids.empty()) return out;
  for (double tau : taus) {
    std::vector<std::vector<Cost>> costs(solver_ids.size(), std::vector<Cost>(pairs.size()));
    for (const SolvedRecord& rec : out.solved) {
      const auto s = static_cast<std::size_t>(
          std::find(solver_ids.begin(), solver_ids.end(), rec.solver_id) - solver_ids.begin());
      const auto p = static_cast<std::size_t>(
          std::find(pairs.begin(), pairs.end(), std::make_pair(rec.problem_id, rec.start)) -
          pairs.begin());
      costs[s][p] = rec.time_to_solve.at(tau);
    }
    out.profiles.emplace(tau, performance_profile(solver_ids, costs, alpha_grid));
  }
  return out;
}

MatrixResult run_matrix(const ExperimentPlan& plan) {
  struct Task {
    std::size_t problem;
    std::size_t start;
    std::size_t solver;
  };
  MatrixResult result;

  std::vector<ProblemInstance> instances;
  instances.reserve(plan.problems.size());
  for (const ProblemSpec& spec : plan.problems) instances.push_back(build_problem(spec));

  std::vector<Task> tasks;
  for (std::size_t p = 0; p < plan.problems.size(); ++p)
    for (std::size_t k = 0; k < plan.starts_per_problem; ++k)
      for (std::size_t s = 0; s < plan.solvers.size(); ++s) tasks.push_back({p, k, s});
  result.runs.resize(tasks.size());

  auto execute = [&](const Task& t) {
    const ProblemInstance& inst = instances[t.problem];
    const SolverSpec& solver = plan.solvers[t.solver];
    RunResult& out = result.runs[&t - tasks.data()];
    out.problem_id = inst.id;
    out.solver_id = solver.id;
    out.start = t.start;

    const std::uint64_t seed = start_seed(plan.master_seed, inst.id, t.start);
    SolverConfig config = solver.config;
    config.budget_seconds = plan.budget_seconds;
    config.max_epochs = plan.budget_epochs;
    config.grad_tol = inst.grad_tol;
    config.permutation.seed = derive_seed(seed, fnv1a("permutation"));
    try {
      out.trace = run(solver.kind, *inst.oracle, inst.initial_point(seed), config);
    } catch (const RunFailure& e) {
      out.trace = e.trace();
      out.error = e.what();
    } catch (const std::exception& e) {
      out.trace.solver = solver.kind;
      out.error = e.what();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(plan.workers, tasks.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) execute(tasks[i]);
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  result.analysis = analyze(result.runs, plan.taus);
  return result;
}

namespace {

std::string tau_tag(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", tau);
  return buf;
}

std::string trace_name(const RunResult& r) {
  return r.problem_id + "__" + r.solver_id + "__start" + std::to_string(r.start) + ".jsonl";
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing", path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

}  // namespace

void emit_analysis(const Analysis& analysis, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    const auto path = dir / "solved.csv";
    auto out = open_csv(path);
    out << "problem,solver,start,f0,fL,f_best";
    std::vector<double> taus;
    for (const auto& [tau, _] : analysis.profiles) taus.push_back(tau);
    for (double tau : taus) out << ",time_tau" << tau_tag(tau);
    out << '\n';
    for (const SolvedRecord& r : analysis.solved) {
      out << r.problem_id << ',' << r.solver_id << ',' << r.start << ',' << r.f0 << ',' << r.fL
          << ',' << r.f_best;
      for (double tau : taus) {
        const auto it = r.time_to_solve.find(tau);
        out << ',';
        if (it != r.time_to_solve.end() && it->second) {
          out << *it->second;
        } else {
          out << "unsolved";
        }
      }
      out << '\n';
    }
    if (!out) throw IoError("failed writing", path);
  }
  for (const auto& [tau, table] : analysis.profiles) {
    emit_profile_csv(table, dir / ("profile_tau" + tau_tag(tau) + ".csv"));
    emit_profile_columns(table, dir / ("profile_tau" + tau_tag(tau) + ".dat"));
  }
}

void emit_results(const MatrixResult& result, const std::filesystem::path& dir) {
  const auto trace_dir = dir / "traces";
  std::filesystem::create_directories(trace_dir);
  for (const RunResult& r : result.runs) emit_trace(r.trace, trace_dir / trace_name(r));

  const auto path = dir / "runs.csv";
  auto out = open_csv(path);
  out << "problem,solver,start,stop,iterations,epochs,final_f,final_zeta,full_evals,"
         "mean_full_evals_per_iteration,acceptance_fraction,restarts,ls_activations,elapsed,error\n";
  for (const RunResult& r : result.runs) {
    const TraceSummary s = r.trace.summary();
    out << r.problem_id << ',' << r.solver_id << ',' << r.start << ',' << to_string(r.trace.stop)
        << ',' << s.iterations << ',' << s.epochs << ',' << s.final_f << ',' << s.final_zeta << ','
        << s.full_value_evals << ',' << s.mean_full_evals_per_iteration << ','
        << s.acceptance_fraction << ',' << s.restarts << ',' << s.ls_activations << ','
        << s.elapsed << ',' << csv_escape(r.error.value_or("")) << '\n';
  }
  if (!out) throw IoError("failed writing", path);

  emit_analysis(result.analysis, dir);
}

std::vector<RunResult> load_runs(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory", dir);
  static const std::regex kName(R"((.+)__(.+)__start(\d+)\.jsonl)");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<RunResult> runs;
  for (const auto& file : files) {
    std::smatch m;
    const std::string name = file.filename().string();
    if (!std::regex_match(name, m, kName)) continue;
    RunResult r;
    r.problem_id = m[1];
    r.solver_id = m[2];
    r.start = static_cast<std::size_t>(std::stoull(m[3]));
    r.trace = parse_trace(file);
    runs.push_back(std::move(r));
  }
  return runs;
}

}  // namespace cmaopt::bench
