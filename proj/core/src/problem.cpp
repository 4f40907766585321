#include "cmaopt/problem.hpp"

#include <cmath>
#include <string>

namespace cmaopt {

bool all_finite(const ParameterVector& w) { return w.allFinite(); }

double FiniteSumOracle::value(const ParameterVector& w) const {
  double sum = 0.0;
  for (std::size_t p = 0; p < num_components(); ++p) sum += component_value(p, w);
  return sum;
}

ParameterVector FiniteSumOracle::gradient(const ParameterVector& w) const {
  ParameterVector sum = ParameterVector::Zero(static_cast<Eigen::Index>(dim()));
  ParameterVector g(static_cast<Eigen::Index>(dim()));
  for (std::size_t p = 0; p < num_components(); ++p) {
    g.setZero();
    component_gradient(p, w, g);
    sum += g;
  }
  return sum;
}

void Evaluator::check_index(std::size_t p) const {
  if (p >= num_components()) {
    throw std::out_of_range("component index " + std::to_string(p) + " out of range [0, " +
                            std::to_string(num_components()) + ")");
  }
}

void Evaluator::check_dim(const ParameterVector& w) const {
  if (static_cast<std::size_t>(w.size()) != dim()) {
    throw std::invalid_argument("parameter dimension " + std::to_string(w.size()) +
                                " does not match oracle dimension " + std::to_string(dim()));
  }
}

double Evaluator::component_value(std::size_t p, const ParameterVector& w) {
  check_index(p);
  check_dim(w);
  const double v = oracle_->component_value(p, w);
  ++counters_.component_value_evals;
  if (!std::isfinite(v)) {
    throw NonFiniteValue("non-finite value from component " + std::to_string(p),
                         static_cast<long>(p));
  }
  return v;
}

void Evaluator::component_gradient(std::size_t p, const ParameterVector& w,
                                   ParameterVector& out) {
  check_index(p);
  check_dim(w);
  out.resize(w.size());
  out.setZero();
  oracle_->component_gradient(p, w, out);
  ++counters_.component_grad_evals;
  if (!out.allFinite()) {
    throw NonFiniteValue("non-finite gradient from component " + std::to_string(p),
                         static_cast<long>(p));
  }
}

ParameterVector Evaluator::component_gradient(std::size_t p, const ParameterVector& w) {
  ParameterVector g;
  component_gradient(p, w, g);
  return g;
}

double Evaluator::full_value(const ParameterVector& w) {
  check_dim(w);
  const double v = oracle_->value(w);
  ++counters_.full_value_evals;
  counters_.component_value_evals += num_components();
  if (!std::isfinite(v)) throw NonFiniteValue("non-finite full objective value", -1);
  return v;
}

ParameterVector Evaluator::full_gradient(const ParameterVector& w) {
  check_dim(w);
  ParameterVector g = oracle_->gradient(w);
  counters_.component_grad_evals += num_components();
  if (!g.allFinite()) throw NonFiniteValue("non-finite full gradient", -1);
  return g;
}

}  // namespace cmaopt
