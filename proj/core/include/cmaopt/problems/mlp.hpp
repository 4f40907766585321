#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>

#include <Eigen/Core>

#include "cmaopt/problem.hpp"
#include "cmaopt/problems/dataset.hpp"

namespace cmaopt {

/// [L x N] fully connected network: L sigmoid hidden layers of N neurons,
/// linear output layer. Every layer has a bias.
struct MLPArchitecture {
  std::size_t hidden_layers = 1;
  std::size_t neurons = 1;
  std::size_t inputs = 1;
  std::size_t outputs = 1;

  void validate() const;
};

/// Trainable parameters: N(d+1) + (L-1)(N^2+N) + m(N+1).
std::size_t param_count(const MLPArchitecture& arch);

/// N(d+1) + N^2(L-1): the count used to size problems in the literature
/// tables, which leaves out hidden biases past the first layer and the output layer.
std::size_t paper_param_count(const MLPArchitecture& arch);

/// Overflow-safe logistic function.
double sigmoid(double t);

/// Network output for one input row.
Eigen::VectorXd mlp_predict(const MLPArchitecture& arch, const ParameterVector& w,
                            const Eigen::VectorXd& x);

/// Regularized least-squares training objective
///   f(w) = (1/P) sum_i ||y_hat(w; x_i) - y_i||^2 + rho ||w||^2
/// split into B contiguous batches of `batch_size` samples (the last one may be
/// shorter). Component p carries its samples' share of the mean plus rho ||w||^2 / B,
/// so the components sum to f exactly.
///
/// Parameter layout, layer by layer from input to output: the weight matrix
/// (fan_out x fan_in, column-major) followed by the bias vector.
class MLPObjective final : public FiniteSumOracle {
 public:
  MLPObjective(MLPArchitecture arch, std::shared_ptr<const Dataset> data, double rho,
               std::size_t batch_size = 1);

  std::size_t num_components() const override { return num_batches_; }
  std::size_t dim() const override { return param_count(arch_); }
  double component_value(std::size_t p, const ParameterVector& w) const override;
  void component_gradient(std::size_t p, const ParameterVector& w,
                          ParameterVector& out) const override;

  const MLPArchitecture& architecture() const { return arch_; }
  const Dataset& data() const { return *data_; }
  double rho() const { return rho_; }
  std::size_t batch_size() const { return batch_size_; }

 private:
  double batch_loss(std::size_t p, const ParameterVector& w, ParameterVector* grad) const;

  MLPArchitecture arch_;
  std::shared_ptr<const Dataset> data_;
  Eigen::MatrixXd inputs_t_;   // d x P
  Eigen::MatrixXd targets_t_;  // m x P
  double rho_;
  std::size_t batch_size_;
  std::size_t num_batches_;
};

/// Uniform entries in [-r, r] with r = 1/sqrt(fan_in) of the owning layer
/// (weights and biases alike).
ParameterVector init_weights(const MLPArchitecture& arch, std::uint64_t seed);

struct Teacher {
  MLPArchitecture arch;
  ParameterVector weights;
};

/// The hidden network behind synth_data: one sigmoid layer of 10 neurons,
/// weights uniform in [-1, 1].
Teacher synth_teacher(std::size_t inputs, std::size_t outputs, std::uint64_t seed);

constexpr double kSynthNoiseSigma = 0.01;

/// Inputs uniform in [-1, 1]^d; targets are teacher outputs plus N(0, 0.01^2) noise.
Dataset synth_data(std::size_t count, std::size_t inputs, std::size_t outputs, std::uint64_t seed);

}  // namespace cmaopt
