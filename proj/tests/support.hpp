#pragma once

#include <cmath>
#include <vector>

#include "cmaopt/problem.hpp"
#include "cmaopt/problems/quadratic.hpp"

namespace cmaopt::testing {

inline ParameterVector scalar(double x) { return ParameterVector::Constant(1, x); }

/// f_1(w) = 1/2 w^2, f_2(w) = 1/2 (w - 2)^2.
inline QuadraticSumProblem quadratic_pair() {
  return QuadraticSumProblem({Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)},
                             {scalar(0.0), scalar(2.0)});
}

/// Components that never change: every gradient is zero.
class ConstantSum final : public FiniteSumOracle {
 public:
  ConstantSum(std::size_t n, std::size_t P) : n_(n), p_(P) {}
  std::size_t num_components() const override { return p_; }
  std::size_t dim() const override { return n_; }
  double component_value(std::size_t p, const ParameterVector&) const override {
    return static_cast<double>(p) + 1.0;
  }
  void component_gradient(std::size_t, const ParameterVector&, ParameterVector& out) const override {
    out.setZero();
  }

 private:
  std::size_t n_, p_;
};

/// Central differences with step 1e-6 (1 + |w_i|), independent of any
/// analytic gradient code.
template <typename ValueFn>
ParameterVector central_difference(ValueFn&& f, const ParameterVector& w) {
  ParameterVector g(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(w(i)));
    ParameterVector wp = w, wm = w;
    wp(i) += h;
    wm(i) -= h;
    g(i) = (f(wp) - f(wm)) / (2.0 * h);
  }
  return g;
}

}  // namespace cmaopt::testing
