#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "cmaopt/problem.hpp"

namespace cmaopt {

/// Visiting order h_1..h_P of the components, stored 0-based.
using Permutation = std::vector<std::size_t>;

enum class PermutationKind { Fixed, ShuffleOnce, Reshuffle };

std::string_view to_string(PermutationKind kind);
PermutationKind parse_permutation_kind(std::string_view name);

struct PermutationStrategy {
  PermutationKind kind = PermutationKind::Fixed;
  std::uint64_t seed = 0;
};

/// Order for the given epoch. Fixed is the identity; ShuffleOnce is one
/// seeded shuffle reused for every epoch; Reshuffle draws a fresh shuffle per
/// epoch from a stream seeded by (seed, epoch). Shuffles are Fisher-Yates
/// with a descending index: for i = P-1..1 swap(order[i], order[below(i+1)]).
Permutation make_permutation(const PermutationStrategy& strategy, std::size_t num_components,
                             std::uint64_t epoch);

bool is_permutation_of_range(const Permutation& perm, std::size_t num_components);

struct InnerCycleResult {
  ParameterVector w_trial;
  /// Sum of the negative component gradients along the cycle.
  ParameterVector direction;
  /// ||w_i - w_0|| for i = 1..P, filled only when requested.
  std::vector<double> displacement_norms;
};

/// One epoch of w_i = w_{i-1} - zeta * grad f_{h_i}(w_{i-1}), i = 1..P.
/// Charges exactly P component-gradient evaluations and no value evaluations.
InnerCycleResult inner_cycle(Evaluator& eval, const ParameterVector& w_start, double zeta,
                             const Permutation& perm, bool record_displacements = false);

/// Right-hand side of the per-step displacement bound
///   ||w_i - w_0|| <= zeta * (L * sum_{j<=i} ||w_{j-1} - w_0|| + sum_{j<=i} ||grad f_{h_j}(w_0)||)
/// evaluated along the actual inner trajectory. Requires the oracle to expose L.
/// Evaluations are made on the raw oracle and are not counted.
std::vector<double> displacement_bound(const FiniteSumOracle& oracle,
                                       const ParameterVector& w_start, double zeta,
                                       const Permutation& perm);

}  // namespace cmaopt
