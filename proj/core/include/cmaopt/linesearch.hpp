#pragma once

#include <functional>
#include <optional>
#include <stdexcept>

#include "cmaopt/problem.hpp"

namespace cmaopt {

struct LinesearchParams {
  double gamma = 1e-6;
  double delta = 0.5;
  /// Largest admissible alpha as a multiple of zeta.
  double alpha_cap = 1e16;

  void validate() const;
};

struct LinesearchOutcome {
  double alpha = 0.0;
  /// Full-function evaluations spent inside the linesearch.
  int probes = 0;
  /// Achieved decrease: f(w) - f(w + alpha d) for EDFL, R - f(w + alpha d) for NMEDFL.
  double certificate = 0.0;
  /// f(w + alpha d) when alpha > 0. On alpha = 0 EDFL reports f(w) and NMEDFL,
  /// which never sees f(w), reports R.
  double value = 0.0;
};

/// Extrapolation would pass alpha_cap * zeta with the acceptance test still
/// holding, which on a coercive objective should never happen.
class ExtrapolationUnbounded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ValueFn = std::function<double(const ParameterVector&)>;

/// Monotone extrapolation derivative-free linesearch.
///
/// Starts from alpha = zeta. Returns 0 when f(w + zeta d) > f(w) - gamma zeta ||d||^2.
/// Otherwise keeps dividing alpha by delta while
///   f(w + (alpha/delta) d) <= min{f(w) - gamma (alpha/delta) ||d||^2, f(w + alpha d)}.
/// f_w must be f(w). When probe_at_zeta is given it must equal f(w + zeta d)
/// and the first test costs no evaluation.
LinesearchOutcome edfl(const ValueFn& value_fn, const ParameterVector& w,
                       const ParameterVector& d, double zeta, const LinesearchParams& params,
                       double f_w, std::optional<double> probe_at_zeta = std::nullopt);

/// Nonmonotone variant against a reference value R >= f(w). Both tests use a
/// quadratic-in-alpha decrease term gamma alpha^2 ||d||^2.
LinesearchOutcome nmedfl(const ValueFn& value_fn, double reference, const ParameterVector& w,
                         const ParameterVector& d, double zeta, const LinesearchParams& params,
                         std::optional<double> probe_at_zeta = std::nullopt);

}  // namespace cmaopt
