#include "cmaopt/problems/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmaopt/random.hpp"

namespace cmaopt {

void MLPArchitecture::validate() const {
  if (hidden_layers == 0 || neurons == 0 || inputs == 0 || outputs == 0) {
    throw std::invalid_argument("MLP architecture needs L, N, d, m >= 1");
  }
}

std::size_t param_count(const MLPArchitecture& arch) {
  const std::size_t n = arch.neurons;
  return n * (arch.inputs + 1) + (arch.hidden_layers - 1) * (n * n + n) + arch.outputs * (n + 1);
}

std::size_t paper_param_count(const MLPArchitecture& arch) {
  const std::size_t n = arch.neurons;
  return n * (arch.inputs + 1) + n * n * (arch.hidden_layers - 1);
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

namespace {

struct LayerShape {
  Eigen::Index fan_in;
  Eigen::Index fan_out;
  Eigen::Index offset;  // start of the weight block; bias follows
};

std::vector<LayerShape> layer_shapes(const MLPArchitecture& arch) {
  std::vector<LayerShape> layers;
  Eigen::Index offset = 0;
  Eigen::Index fan_in = static_cast<Eigen::Index>(arch.inputs);
  for (std::size_t l = 0; l <= arch.hidden_layers; ++l) {
    const Eigen::Index fan_out = static_cast<Eigen::Index>(
        l < arch.hidden_layers ? arch.neurons : arch.outputs);
    layers.push_back({fan_in, fan_out, offset});
    offset += fan_out * (fan_in + 1);
    fan_in = fan_out;
  }
  return layers;
}

using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
using MatMap = Eigen::Map<Eigen::MatrixXd>;

Eigen::MatrixXd sigmoid_of(const Eigen::MatrixXd& z) { return z.unaryExpr(&sigmoid); }

// Forward pass over the columns of `x`; activations[l] is the input to layer l,
// activations.back() is the network output.
std::vector<Eigen::MatrixXd> forward(const std::vector<LayerShape>& layers, const ParameterVector& w,
                                     const Eigen::Ref<const Eigen::MatrixXd>& x) {
  std::vector<Eigen::MatrixXd> activations;
  activations.reserve(layers.size() + 1);
  activations.emplace_back(x);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& s = layers[l];
    ConstMatMap weight(w.data() + s.offset, s.fan_out, s.fan_in);
    Eigen::Map<const Eigen::VectorXd> bias(w.data() + s.offset + s.fan_out * s.fan_in, s.fan_out);
    Eigen::MatrixXd z = weight * activations.back();
    z.colwise() += bias;
    if (l + 1 < layers.size()) {
      activations.push_back(sigmoid_of(z));
    } else {
      activations.push_back(std::move(z));
    }
  }
  return activations;
}

}  // namespace

Eigen::VectorXd mlp_predict(const MLPArchitecture& arch, const ParameterVector& w,
                            const Eigen::VectorXd& x) {
  arch.validate();
  if (static_cast<std::size_t>(w.size()) != param_count(arch) ||
      static_cast<std::size_t>(x.size()) != arch.inputs) {
    throw std::invalid_argument("mlp_predict: dimension mismatch");
  }
  return forward(layer_shapes(arch), w, x).back();
}

MLPObjective::MLPObjective(MLPArchitecture arch, std::shared_ptr<const Dataset> data, double rho,
                           std::size_t batch_size)
    : arch_(arch), data_(std::move(data)), rho_(rho), batch_size_(batch_size) {
  arch_.validate();
  if (!data_) throw std::invalid_argument("MLPObjective: null dataset");
  if (data_->size() == 0) throw std::invalid_argument("MLPObjective: empty dataset");
  if (data_->input_dim() != arch_.inputs || data_->output_dim() != arch_.outputs) {
    throw std::invalid_argument("MLPObjective: dataset shape (" + std::to_string(data_->input_dim()) +
                                " -> " + std::to_string(data_->output_dim()) +
                                ") does not match architecture (" + std::to_string(arch_.inputs) +
                                " -> " + std::to_string(arch_.outputs) + ")");
  }
  if (data_->targets.rows() != data_->inputs.rows()) {
    throw std::invalid_argument("MLPObjective: input and target row counts differ");
  }
  if (!(rho_ >= 0.0)) throw std::invalid_argument("MLPObjective: rho must be >= 0");
  if (batch_size_ == 0) throw std::invalid_argument("MLPObjective: batch_size must be >= 1");
  inputs_t_ = data_->inputs.transpose();
  targets_t_ = data_->targets.transpose();
  num_batches_ = (data_->size() + batch_size_ - 1) / batch_size_;
}

double MLPObjective::batch_loss(std::size_t p, const ParameterVector& w, ParameterVector* grad) const {
  const auto layers = layer_shapes(arch_);
  const auto start = static_cast<Eigen::Index>(p * batch_size_);
  const auto count =
      std::min(static_cast<Eigen::Index>(batch_size_), static_cast<Eigen::Index>(data_->size()) - start);
  const double inv_samples = 1.0 / static_cast<double>(data_->size());
  const double reg_share = rho_ / static_cast<double>(num_batches_);

  const auto activations = forward(layers, w, inputs_t_.middleCols(start, count));
  const Eigen::MatrixXd residual = activations.back() - targets_t_.middleCols(start, count);
  const double value = inv_samples * residual.squaredNorm() + reg_share * w.squaredNorm();
  if (!grad) return value;

  Eigen::MatrixXd delta = (2.0 * inv_samples) * residual;
  for (std::size_t l = layers.size(); l-- > 0;) {
    const LayerShape& s = layers[l];
    MatMap grad_weight(grad->data() + s.offset, s.fan_out, s.fan_in);
    Eigen::Map<Eigen::VectorXd> grad_bias(grad->data() + s.offset + s.fan_out * s.fan_in, s.fan_out);
    const Eigen::MatrixXd& input = activations[l];
    grad_weight.noalias() = delta * input.transpose();
    grad_bias = delta.rowwise().sum();
    if (l > 0) {
      ConstMatMap weight(w.data() + s.offset, s.fan_out, s.fan_in);
      Eigen::MatrixXd back = weight.transpose() * delta;
      delta = back.array() * input.array() * (1.0 - input.array());
    }
  }
  *grad += (2.0 * reg_share) * w;
  return value;
}

double MLPObjective::component_value(std::size_t p, const ParameterVector& w) const {
  return batch_loss(p, w, nullptr);
}

void MLPObjective::component_gradient(std::size_t p, const ParameterVector& w,
                                      ParameterVector& out) const {
  out.resize(w.size());
  batch_loss(p, w, &out);
}

ParameterVector init_weights(const MLPArchitecture& arch, std::uint64_t seed) {
  arch.validate();
  Rng rng(seed);
  ParameterVector w(static_cast<Eigen::Index>(param_count(arch)));
  for (const LayerShape& s : layer_shapes(arch)) {
    const double r = 1.0 / std::sqrt(static_cast<double>(s.fan_in));
    const Eigen::Index block = s.fan_out * (s.fan_in + 1);
    for (Eigen::Index i = 0; i < block; ++i) w(s.offset + i) = rng.uniform(-r, r);
  }
  return w;
}

Teacher synth_teacher(std::size_t inputs, std::size_t outputs, std::uint64_t seed) {
  Teacher t;
  t.arch = {1, 10, inputs, outputs};
  t.arch.validate();
  Rng rng(derive_seed(seed, 1));
  t.weights.resize(static_cast<Eigen::Index>(param_count(t.arch)));
  for (Eigen::Index i = 0; i < t.weights.size(); ++i) t.weights(i) = rng.uniform(-1.0, 1.0);
  return t;
}

Dataset synth_data(std::size_t count, std::size_t inputs, std::size_t outputs, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("synth_data: sample count must be >= 1");
  const Teacher teacher = synth_teacher(inputs, outputs, seed);

  Dataset data;
  const auto rows = static_cast<Eigen::Index>(count);
  data.inputs.resize(rows, static_cast<Eigen::Index>(inputs));
  Rng input_rng(derive_seed(seed, 2));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < data.inputs.cols(); ++j) data.inputs(i, j) = input_rng.uniform(-1.0, 1.0);

  const auto layers = layer_shapes(teacher.arch);
  const Eigen::MatrixXd clean = forward(layers, teacher.weights, data.inputs.transpose()).back();
  data.targets = clean.transpose();
  Rng noise_rng(derive_seed(seed, 3));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < data.targets.cols(); ++j)
      data.targets(i, j) += kSynthNoiseSigma * noise_rng.normal();

  data.provenance.source = Provenance::Source::Synthetic;
  data.provenance.seed = seed;
  return data;
}

}  // namespace cmaopt
