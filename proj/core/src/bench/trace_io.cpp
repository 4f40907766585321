#include "cmaopt/bench/trace_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cmaopt::bench {

using nlohmann::json;

void write_trace(std::ostream& out, const RunTrace& trace) {
  for (const IterationRecord& r : trace.records) {
    json j;
    j["k"] = r.k;
    j["f"] = r.f;
    j["zeta"] = r.zeta;
    j["alpha"] = r.alpha;
    j["dnorm"] = r.direction_norm;
    j["branch"] = std::string(to_string(r.branch));
    j["probes"] = r.probes;
    j["evals"] = {{"full", r.counters.full_value_evals},
                  {"cval", r.counters.component_value_evals},
                  {"cgrad", r.counters.component_grad_evals},
                  {"epochs", r.epochs}};
    j["t"] = r.elapsed;
    out << j.dump() << '\n';
  }
}

void emit_trace(const RunTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open trace for writing", path);
  write_trace(out, trace);
  if (!out) throw IoError("failed writing trace", path);
}

RunTrace read_trace(std::istream& in) {
  RunTrace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      IterationRecord r;
      r.k = j.at("k").get<std::uint64_t>();
      r.f = j.at("f").get<double>();
      r.zeta = j.at("zeta").get<double>();
      r.alpha = j.at("alpha").get<double>();
      r.direction_norm = j.at("dnorm").get<double>();
      r.branch = parse_branch(j.at("branch").get<std::string>());
      r.probes = j.at("probes").get<int>();
      const json& e = j.at("evals");
      r.counters.full_value_evals = e.at("full").get<std::uint64_t>();
      r.counters.component_value_evals = e.at("cval").get<std::uint64_t>();
      r.counters.component_grad_evals = e.at("cgrad").get<std::uint64_t>();
      r.epochs = e.at("epochs").get<std::uint64_t>();
      r.elapsed = j.at("t").get<double>();
      trace.records.push_back(r);
    } catch (const std::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return trace;
}

RunTrace parse_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace", path);
  try {
    return read_trace(in);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what(), path);
  }
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing", path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

}  // namespace

void emit_profile_csv(const ProfileTable& table, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "alpha";
  for (const auto& s : table.solvers) out << ',' << s;
  out << '\n';
  for (std::size_t i = 0; i < table.alpha_grid.size(); ++i) {
    out << table.alpha_grid[i];
    for (const auto& row : table.rho) out << ',' << row[i];
    out << '\n';
  }
  if (!out) throw IoError("failed writing profile", path);
}

void emit_profile_columns(const ProfileTable& table, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "# alpha";
  for (const auto& s : table.solvers) out << ' ' << s;
  out << '\n';
  for (std::size_t i = 0; i < table.alpha_grid.size(); ++i) {
    out << table.alpha_grid[i];
    for (const auto& row : table.rho) out << ' ' << row[i];
    out << '\n';
  }
  if (!out) throw IoError("failed writing profile", path);
}

}  // namespace cmaopt::bench
