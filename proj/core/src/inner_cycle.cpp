#include "cmaopt/inner_cycle.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "cmaopt/random.hpp"

namespace cmaopt {

std::string_view to_string(PermutationKind kind) {
  switch (kind) {
    case PermutationKind::Fixed:
      return "fixed";
    case PermutationKind::ShuffleOnce:
      return "shuffle_once";
    case PermutationKind::Reshuffle:
      return "reshuffle";
  }
  return "unknown";
}

PermutationKind parse_permutation_kind(std::string_view name) {
  if (name == "fixed") return PermutationKind::Fixed;
  if (name == "shuffle_once") return PermutationKind::ShuffleOnce;
  if (name == "reshuffle") return PermutationKind::Reshuffle;
  throw std::invalid_argument("unknown permutation kind '" + std::string(name) + "'");
}

namespace {

void fisher_yates(Permutation& order, Rng& rng) {
  for (std::size_t i = order.size(); i-- > 1;) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(order[i], order[j]);
  }
}

}  // namespace

Permutation make_permutation(const PermutationStrategy& strategy, std::size_t num_components,
                             std::uint64_t epoch) {
  Permutation order(num_components);
  std::iota(order.begin(), order.end(), std::size_t{0});
  switch (strategy.kind) {
    case PermutationKind::Fixed:
      break;
    case PermutationKind::ShuffleOnce: {
      Rng rng(derive_seed(strategy.seed, 0));
      fisher_yates(order, rng);
      break;
    }
    case PermutationKind::Reshuffle: {
      Rng rng(derive_seed(strategy.seed, epoch));
      fisher_yates(order, rng);
      break;
    }
  }
  return order;
}

bool is_permutation_of_range(const Permutation& perm, std::size_t num_components) {
  if (perm.size() != num_components) return false;
  std::vector<bool> seen(num_components, false);
  for (std::size_t h : perm) {
    if (h >= num_components || seen[h]) return false;
    seen[h] = true;
  }
  return true;
}

InnerCycleResult inner_cycle(Evaluator& eval, const ParameterVector& w_start, double zeta,
                             const Permutation& perm, bool record_displacements) {
  if (!(zeta > 0.0)) throw std::invalid_argument("inner_cycle: zeta must be positive");
  if (static_cast<std::size_t>(w_start.size()) != eval.dim()) {
    throw std::invalid_argument("inner_cycle: w_start has wrong dimension");
  }
  if (perm.size() != eval.num_components()) {
    throw std::invalid_argument("inner_cycle: permutation length differs from P");
  }

  InnerCycleResult result;
  result.w_trial = w_start;
  result.direction = ParameterVector::Zero(w_start.size());
  if (record_displacements) result.displacement_norms.reserve(perm.size());

  ParameterVector grad(w_start.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    eval.component_gradient(perm[i], result.w_trial, grad);
    result.direction -= grad;
    result.w_trial -= zeta * grad;
    if (!result.w_trial.allFinite()) {
      throw NonFiniteValue("inner cycle produced a non-finite point at inner step " +
                               std::to_string(i + 1) + " (component " +
                               std::to_string(perm[i]) + ")",
                           static_cast<long>(perm[i]));
    }
    if (record_displacements) {
      result.displacement_norms.push_back((result.w_trial - w_start).norm());
    }
  }
  return result;
}

std::vector<double> displacement_bound(const FiniteSumOracle& oracle,
                                       const ParameterVector& w_start, double zeta,
                                       const Permutation& perm) {
  const auto lipschitz = oracle.lipschitz_constant();
  if (!lipschitz) {
    throw UnsupportedProblem("displacement_bound: oracle does not expose a Lipschitz constant");
  }
  if (!(zeta >= 0.0)) throw std::invalid_argument("displacement_bound: zeta must be >= 0");

  std::vector<double> bounds;
  bounds.reserve(perm.size());
  ParameterVector w = w_start;
  ParameterVector grad(w_start.size());
  double displacement_sum = 0.0;  // sum_{j<=i} ||w_{j-1} - w_0||
  double anchor_grad_sum = 0.0;   // sum_{j<=i} ||grad f_{h_j}(w_0)||
  for (std::size_t h : perm) {
    displacement_sum += (w - w_start).norm();
    grad.setZero();
    oracle.component_gradient(h, w_start, grad);
    anchor_grad_sum += grad.norm();
    bounds.push_back(zeta * (*lipschitz * displacement_sum + anchor_grad_sum));

    grad.setZero();
    oracle.component_gradient(h, w, grad);
    w -= zeta * grad;
  }
  return bounds;
}

}  // namespace cmaopt
