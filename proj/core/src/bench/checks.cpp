#include "cmaopt/bench/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>

#include "cmaopt/bench/profile.hpp"
#include "cmaopt/inner_cycle.hpp"
#include "cmaopt/linesearch.hpp"
#include "cmaopt/problems/mlp.hpp"
#include "cmaopt/problems/quadratic.hpp"
#include "cmaopt/random.hpp"
#include "cmaopt/solvers.hpp"

namespace cmaopt::bench {

namespace {

struct Family {
  std::string name;
  std::shared_ptr<const FiniteSumOracle> oracle;
  std::function<ParameterVector(std::uint64_t)> point;
};

std::vector<Family> families(std::uint64_t seed) {
  std::vector<Family> out;
  auto quad = std::make_shared<QuadraticSumProblem>(quadratic_make(5, 8, derive_seed(seed, 1)));
  out.push_back({"quadratic[n=5,P=8]", quad, [](std::uint64_t s) { return random_point(5, s); }});
  const MLPArchitecture arch{2, 4, 3, 1};
  auto data = std::make_shared<Dataset>(synth_data(24, 3, 1, derive_seed(seed, 2)));
  auto mlp = std::make_shared<MLPObjective>(arch, data, 1e-6, 4);
  out.push_back({"mlp[2x4]", mlp, [arch](std::uint64_t s) { return init_weights(arch, s); }});
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

CheckResult check_additivity(const std::vector<Family>& fams, std::uint64_t seed) {
  double worst = 0.0;
  for (const auto& fam : fams) {
    for (std::uint64_t t = 0; t < 20; ++t) {
      const ParameterVector w = fam.point(derive_seed(seed, 10, t));
      double sum = 0.0, max_abs = 0.0;
      ParameterVector gsum = ParameterVector::Zero(w.size()), g(w.size());
      for (std::size_t p = 0; p < fam.oracle->num_components(); ++p) {
        const double v = fam.oracle->component_value(p, w);
        sum += v;
        max_abs = std::max(max_abs, std::abs(v));
        fam.oracle->component_gradient(p, w, g);
        gsum += g;
      }
      const double scale = 1e-10 * static_cast<double>(fam.oracle->num_components()) * (1.0 + max_abs);
      worst = std::max(worst, std::abs(fam.oracle->value(w) - sum) / scale);
      worst = std::max(worst, (fam.oracle->gradient(w) - gsum).lpNorm<Eigen::Infinity>() / scale);
    }
  }
  return {"oracle additivity", worst <= 1.0, "worst error / tolerance = " + fmt(worst)};
}

CheckResult check_gradients(const std::vector<Family>& fams, std::uint64_t seed) {
  double worst = 0.0;
  for (const auto& fam : fams) {
    for (std::uint64_t t = 0; t < 3; ++t) {
      const ParameterVector w = fam.point(derive_seed(seed, 20, t));
      const std::size_t p = t % fam.oracle->num_components();
      ParameterVector g(w.size()), fd(w.size());
      fam.oracle->component_gradient(p, w, g);
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::abs(w(i)));
        ParameterVector wp = w, wm = w;
        wp(i) += h;
        wm(i) -= h;
        fd(i) = (fam.oracle->component_value(p, wp) - fam.oracle->component_value(p, wm)) / (2.0 * h);
      }
      worst = std::max(worst, (g - fd).norm() / std::max(fd.norm(), 1e-8));
    }
  }
  return {"component gradient vs finite differences", worst <= 1e-5,
          "worst relative error = " + fmt(worst)};
}

CheckResult check_inner_cycle(const std::vector<Family>& fams, std::uint64_t seed) {
  double worst = 0.0;
  for (const auto& fam : fams) {
    for (std::uint64_t t = 0; t < 20; ++t) {
      Evaluator eval(*fam.oracle);
      const ParameterVector w = fam.point(derive_seed(seed, 30, t));
      const double zeta = 1e-3 * std::pow(10.0, static_cast<double>(t % 3));
      const auto perm = make_permutation({PermutationKind::Reshuffle, seed}, eval.num_components(), t);
      const auto res = inner_cycle(eval, w, zeta, perm);
      const double err = (res.w_trial - (w + zeta * res.direction)).lpNorm<Eigen::Infinity>();
      worst = std::max(worst, err / (1e-9 * (1.0 + w.norm())));
    }
  }
  return {"inner-cycle identity w~ = w + zeta d", worst <= 1.0, "worst error / tolerance = " + fmt(worst)};
}

CheckResult check_displacement(std::uint64_t seed) {
  std::size_t violations = 0;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const auto q = quadratic_make(4, 6, derive_seed(seed, 40, t));
    const ParameterVector w = random_point(4, derive_seed(seed, 41, t));
    const double zeta = 1e-3 * std::pow(10.0, static_cast<double>(t % 3));
    const auto perm = make_permutation({PermutationKind::Reshuffle, seed}, 6, t);
    Evaluator eval(q);
    const auto res = inner_cycle(eval, w, zeta, perm, true);
    const auto bound = displacement_bound(q, w, zeta, perm);
    for (std::size_t i = 0; i < bound.size(); ++i)
      if (res.displacement_norms[i] > bound[i] * (1.0 + 1e-12) + 1e-15) ++violations;
  }
  return {"inner displacement bound", violations == 0, std::to_string(violations) + " violations"};
}

CheckResult check_linesearch(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 50));
  std::size_t violations = 0;
  const LinesearchParams params;
  for (int t = 0; t < 500; ++t) {
    const double a = rng.uniform(0.1, 10.0), c = rng.uniform(-2.0, 2.0);
    auto f = [=](const ParameterVector& x) { return 0.5 * a * (x(0) - c) * (x(0) - c); };
    ParameterVector w(1), d(1);
    w(0) = rng.uniform(-3.0, 3.0);
    d(0) = rng.uniform(-3.0, 3.0);
    const double zeta = rng.uniform(1e-3, 1.0);
    const double fw = f(w);
    const auto e = edfl(f, w, d, zeta, params, fw);
    if (f(w + e.alpha * d) > fw - params.gamma * e.alpha * d.squaredNorm() + 1e-12) ++violations;
    const double reference = fw + rng.uniform(0.0, 1.0);
    const auto n = nmedfl(f, reference, w, d, zeta, params);
    if (f(w + n.alpha * d) > reference - params.gamma * n.alpha * n.alpha * d.squaredNorm() + 1e-12) {
      ++violations;
    }
  }
  return {"linesearch sufficient-decrease certificates", violations == 0,
          std::to_string(violations) + " violations over 1000 calls"};
}

CheckResult check_solvers(const std::vector<Family>& fams, std::uint64_t seed) {
  std::size_t level = 0, nonmono = 0, law = 0;
  for (const auto& fam : fams) {
    SolverConfig cfg;
    const ParameterVector w0 = fam.point(derive_seed(seed, 60));

    SolverState cma(*fam.oracle, w0, cfg.zeta0, cfg.memory);
    cma.set_initial_value(cma.eval.full_value(cma.w));
    for (int k = 0; k < 100; ++k) {
      const double zeta = cma.zeta;
      cma_iterate(cma, cfg);
      if (cma.f > cma.f_w0 + 1e-10 * (1.0 + std::abs(cma.f_w0))) ++level;
      if (cma.zeta != zeta && cma.zeta != cfg.theta * zeta) ++law;
    }

    SolverState nm(*fam.oracle, w0, cfg.zeta0, cfg.memory);
    nm.set_initial_value(nm.eval.full_value(nm.w));
    for (int k = 0; k < 100; ++k) {
      const double zeta = nm.zeta;
      const ParameterVector before = nm.w;
      nmcma_iterate(nm, cfg);
      const double step = (nm.w - before).norm();
      if (nm.f > nm.last_reference - cfg.gamma * std::min(step, step * step) + 1e-12) ++nonmono;
      if (nm.zeta != zeta && nm.zeta != cfg.theta * zeta) ++law;
    }
  }
  return {"CMA level set, NMCMA decrease, stepsize law", level + nonmono + law == 0,
          std::to_string(level) + " level-set, " + std::to_string(nonmono) + " nonmonotone, " +
              std::to_string(law) + " stepsize violations"};
}

CheckResult check_profiles(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 70));
  std::size_t violations = 0;
  for (int t = 0; t < 50; ++t) {
    std::vector<std::vector<Cost>> costs(3, std::vector<Cost>(6));
    for (auto& row : costs)
      for (auto& c : row)
        if (rng.uniform01() < 0.8) c = rng.uniform(0.1, 10.0);
    const auto table = performance_profile({"a", "b", "c"}, costs);
    for (const auto& rho : table.rho) {
      for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rho[i] < 0.0 || rho[i] > 1.0) ++violations;
        if (i > 0 && rho[i] < rho[i - 1]) ++violations;
      }
    }
  }
  return {"performance profile monotone in [0,1]", violations == 0,
          std::to_string(violations) + " violations"};
}

}  // namespace

std::vector<CheckResult> run_invariant_checks(std::uint64_t seed) {
  const auto fams = families(seed);
  std::vector<CheckResult> results;
  results.push_back(check_additivity(fams, seed));
  results.push_back(check_gradients(fams, seed));
  results.push_back(check_inner_cycle(fams, seed));
  results.push_back(check_displacement(seed));
  results.push_back(check_linesearch(seed));
  results.push_back(check_solvers(fams, seed));
  results.push_back(check_profiles(seed));
  return results;
}

}  // namespace cmaopt::bench
