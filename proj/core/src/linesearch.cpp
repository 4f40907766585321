#include "cmaopt/linesearch.hpp"

#include <algorithm>
#include <string>

namespace cmaopt {

void LinesearchParams::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("linesearch: gamma must be in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("linesearch: delta must be in (0,1)");
  if (!(alpha_cap >= 1.0)) throw std::invalid_argument("linesearch: alpha_cap must be >= 1");
}

namespace {

// Shared body of both linesearches. `decrease(alpha)` is the forcing term
// subtracted from `baseline` in the acceptance tests.
template <typename Decrease>
LinesearchOutcome extrapolate(const ValueFn& value_fn, double baseline, double f_w,
                              const ParameterVector& w, const ParameterVector& d, double zeta,
                              const LinesearchParams& params,
                              std::optional<double> probe_at_zeta, Decrease decrease) {
  params.validate();
  if (!(zeta > 0.0)) throw std::invalid_argument("linesearch: zeta must be positive");

  LinesearchOutcome out;
  double alpha = zeta;
  double f_alpha;
  if (probe_at_zeta) {
    f_alpha = *probe_at_zeta;
  } else {
    f_alpha = value_fn(w + alpha * d);
    ++out.probes;
  }

  if (f_alpha > baseline - decrease(alpha)) {
    out.alpha = 0.0;
    out.value = f_w;
    out.certificate = baseline - f_w;
    return out;
  }

  const double cap = params.alpha_cap * zeta;
  for (;;) {
    const double next = alpha / params.delta;
    const double f_next = value_fn(w + next * d);
    ++out.probes;
    // Equality continues the extrapolation.
    if (!(f_next <= std::min(baseline - decrease(next), f_alpha))) break;
    if (next > cap) {
      throw ExtrapolationUnbounded("linesearch: extrapolation exceeded alpha_cap * zeta = " +
                                   std::to_string(cap) +
                                   "; objective is likely unbounded below along d");
    }
    alpha = next;
    f_alpha = f_next;
  }

  out.alpha = alpha;
  out.value = f_alpha;
  out.certificate = baseline - f_alpha;
  return out;
}

}  // namespace

LinesearchOutcome edfl(const ValueFn& value_fn, const ParameterVector& w,
                       const ParameterVector& d, double zeta, const LinesearchParams& params,
                       double f_w, std::optional<double> probe_at_zeta) {
  const double dd = d.squaredNorm();
  const double gamma = params.gamma;
  return extrapolate(value_fn, f_w, f_w, w, d, zeta, params, probe_at_zeta,
                     [=](double a) { return gamma * a * dd; });
}

LinesearchOutcome nmedfl(const ValueFn& value_fn, double reference, const ParameterVector& w,
                         const ParameterVector& d, double zeta, const LinesearchParams& params,
                         std::optional<double> probe_at_zeta) {
  const double dd = d.squaredNorm();
  const double gamma = params.gamma;
  // f(w) is not known here; alpha = 0 leaves the point unchanged and the
  // caller keeps its own f(w). `value` is reported as R in that case.
  return extrapolate(value_fn, reference, reference, w, d, zeta, params, probe_at_zeta,
                     [=](double a) { return gamma * a * a * dd; });
}

}  // namespace cmaopt
