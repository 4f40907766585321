#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace cmaopt {

/// The optimization variable. Dimension is fixed for the lifetime of a run.
using ParameterVector = Eigen::VectorXd;

/// Raised when an oracle produces NaN or Inf. Carries the offending component
/// index (or -1 for a full-sum evaluation) so the failure can be located.
class NonFiniteValue : public std::runtime_error {
 public:
  NonFiniteValue(const std::string& what, long component)
      : std::runtime_error(what), component_(component) {}
  long component() const noexcept { return component_; }

 private:
  long component_;
};

class UnsupportedProblem : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Finite-sum objective f(w) = sum_p f_p(w), p in [0, P).
///
/// Implementations are immutable after construction and may be shared by
/// concurrent runs. Nothing here counts evaluations; that is done per run by
/// Evaluator.
class FiniteSumOracle {
 public:
  virtual ~FiniteSumOracle() = default;

  virtual std::size_t num_components() const = 0;
  virtual std::size_t dim() const = 0;

  /// f_p(w). No range or finiteness checks.
  virtual double component_value(std::size_t p, const ParameterVector& w) const = 0;

  /// Writes grad f_p(w) into out (already sized to dim()).
  virtual void component_gradient(std::size_t p, const ParameterVector& w,
                                   ParameterVector& out) const = 0;

  /// Global Lipschitz constant of every grad f_p when known analytically.
  virtual std::optional<double> lipschitz_constant() const { return std::nullopt; }

  /// Sum of component values, accumulated in index order.
  double value(const ParameterVector& w) const;

  /// Sum of component gradients, accumulated in index order.
  ParameterVector gradient(const ParameterVector& w) const;
};

struct EvalCounters {
  std::uint64_t full_value_evals = 0;
  std::uint64_t component_value_evals = 0;
  std::uint64_t component_grad_evals = 0;

  /// One epoch is P component-gradient evaluations.
  std::uint64_t epochs(std::size_t num_components) const {
    return component_grad_evals / num_components;
  }

  bool operator==(const EvalCounters&) const = default;
};

/// Per-run accounting view over a shared oracle. Every call validates its
/// inputs and rejects non-finite results.
class Evaluator {
 public:
  explicit Evaluator(const FiniteSumOracle& oracle) : oracle_(&oracle) {}

  const FiniteSumOracle& oracle() const { return *oracle_; }
  std::size_t num_components() const { return oracle_->num_components(); }
  std::size_t dim() const { return oracle_->dim(); }

  double component_value(std::size_t p, const ParameterVector& w);
  ParameterVector component_gradient(std::size_t p, const ParameterVector& w);
  void component_gradient(std::size_t p, const ParameterVector& w, ParameterVector& out);
  double full_value(const ParameterVector& w);
  ParameterVector full_gradient(const ParameterVector& w);

  const EvalCounters& counters() const { return counters_; }
  std::uint64_t epochs() const { return counters_.epochs(num_components()); }

 private:
  void check_index(std::size_t p) const;
  void check_dim(const ParameterVector& w) const;

  const FiniteSumOracle* oracle_;
  EvalCounters counters_;
};

bool all_finite(const ParameterVector& w);

}  // namespace cmaopt
