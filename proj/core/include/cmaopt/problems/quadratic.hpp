#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "cmaopt/problem.hpp"

namespace cmaopt {

/// f_p(w) = 1/2 (w - c_p)^T A_p (w - c_p) with every A_p symmetric positive definite.
/// The global minimizer, optimal value and Lipschitz constant are computed
/// once at construction.
class QuadraticSumProblem final : public FiniteSumOracle {
 public:
  QuadraticSumProblem(std::vector<Eigen::MatrixXd> curvatures, std::vector<Eigen::VectorXd> centers);

  std::size_t num_components() const override { return curvatures_.size(); }
  std::size_t dim() const override { return static_cast<std::size_t>(centers_.front().size()); }
  double component_value(std::size_t p, const ParameterVector& w) const override;
  void component_gradient(std::size_t p, const ParameterVector& w,
                          ParameterVector& out) const override;
  std::optional<double> lipschitz_constant() const override { return lipschitz_; }

  const ParameterVector& minimizer() const { return minimizer_; }
  double optimal_value() const { return optimal_value_; }
  const Eigen::MatrixXd& curvature(std::size_t p) const { return curvatures_[p]; }
  const Eigen::VectorXd& center(std::size_t p) const { return centers_[p]; }

 private:
  std::vector<Eigen::MatrixXd> curvatures_;
  std::vector<Eigen::VectorXd> centers_;
  ParameterVector minimizer_;
  double optimal_value_ = 0.0;
  double lipschitz_ = 0.0;
};

/// Seeded instance: A_p = Q diag(lambda) Q^T with Q Haar-orthogonal and
/// lambda uniform in [0.1, 10]; centers uniform in [-2, 2]^n.
QuadraticSumProblem quadratic_make(std::size_t n, std::size_t num_components, std::uint64_t seed);

/// Uniform point in [-radius, radius]^n.
ParameterVector random_point(std::size_t n, std::uint64_t seed, double radius = 3.0);

}  // namespace cmaopt
