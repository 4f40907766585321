#include "cmaopt/problems/quadratic.hpp"

#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "cmaopt/random.hpp"

namespace cmaopt {

QuadraticSumProblem::QuadraticSumProblem(std::vector<Eigen::MatrixXd> curvatures,
                                         std::vector<Eigen::VectorXd> centers)
    : curvatures_(std::move(curvatures)), centers_(std::move(centers)) {
  if (curvatures_.empty() || curvatures_.size() != centers_.size()) {
    throw std::invalid_argument("quadratic problem needs matching, non-empty A_p and c_p lists");
  }
  const Eigen::Index n = centers_.front().size();
  if (n == 0) throw std::invalid_argument("quadratic problem needs n >= 1");

  Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t p = 0; p < curvatures_.size(); ++p) {
    const Eigen::MatrixXd& a = curvatures_[p];
    if (a.rows() != n || a.cols() != n || centers_[p].size() != n) {
      throw std::invalid_argument("quadratic component " + std::to_string(p) + " has wrong shape");
    }
    if (!a.isApprox(a.transpose(), 1e-12)) {
      throw std::invalid_argument("quadratic component " + std::to_string(p) + " is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() <= 0.0) {
      throw std::invalid_argument("quadratic component " + std::to_string(p) +
                                  " is not positive definite");
    }
    lipschitz_ = std::max(lipschitz_, eig.eigenvalues().maxCoeff());
    hessian += a;
    rhs += a * centers_[p];
  }
  minimizer_ = hessian.llt().solve(rhs);
  optimal_value_ = value(minimizer_);
}

double QuadraticSumProblem::component_value(std::size_t p, const ParameterVector& w) const {
  const Eigen::VectorXd r = w - centers_[p];
  return 0.5 * r.dot(curvatures_[p] * r);
}

void QuadraticSumProblem::component_gradient(std::size_t p, const ParameterVector& w,
                                             ParameterVector& out) const {
  out.noalias() = curvatures_[p] * (w - centers_[p]);
}

QuadraticSumProblem quadratic_make(std::size_t n, std::size_t num_components, std::uint64_t seed) {
  if (n == 0 || num_components == 0) throw std::invalid_argument("quadratic_make: n, P >= 1");
  Rng rng(seed);
  const auto dim = static_cast<Eigen::Index>(n);
  std::vector<Eigen::MatrixXd> curvatures;
  std::vector<Eigen::VectorXd> centers;
  curvatures.reserve(num_components);
  centers.reserve(num_components);
  for (std::size_t p = 0; p < num_components; ++p) {
    Eigen::MatrixXd gauss(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j)
      for (Eigen::Index i = 0; i < dim; ++i) gauss(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd lambda(dim);
    for (Eigen::Index i = 0; i < dim; ++i) lambda(i) = rng.uniform(0.1, 10.0);
    Eigen::MatrixXd a = q * lambda.asDiagonal() * q.transpose();
    a = 0.5 * (a + a.transpose()).eval();
    curvatures.push_back(std::move(a));

    Eigen::VectorXd c(dim);
    for (Eigen::Index i = 0; i < dim; ++i) c(i) = rng.uniform(-2.0, 2.0);
    centers.push_back(std::move(c));
  }
  return QuadraticSumProblem(std::move(curvatures), std::move(centers));
}

ParameterVector random_point(std::size_t n, std::uint64_t seed, double radius) {
  Rng rng(seed);
  ParameterVector w(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.uniform(-radius, radius);
  return w;
}

}  // namespace cmaopt
