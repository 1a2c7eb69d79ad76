#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

namespace eea {

enum class Activation { Identity, Tanh, Relu };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation activation);

/// Additive skip connection: the post-activation output of `from` (0 is the
/// network input) is added to the pre-activation input of `to`. Requires
/// matching layer widths and from < to. Skips carry no parameters.
struct SkipConnection {
  int from = 0;
  int to = 0;
};

/// Fully connected network with one activation per weight layer and a flat
/// parameter vector laid out as W1, b1, W2, b2, ... The parameter count is
/// the sum of (n_in + 1) * n_out over layers.
class DenseNet {
 public:
  DenseNet() = default;
  DenseNet(std::vector<int> layer_sizes, std::vector<Activation> activations,
           std::vector<SkipConnection> skips = {});

  /// Convenience: `hidden` on every layer but the last, identity output.
  static DenseNet mlp(std::vector<int> layer_sizes, Activation hidden);

  int input_size() const { return layer_sizes_.front(); }
  int output_size() const { return layer_sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  const std::vector<Activation>& activations() const { return activations_; }
  long param_count() const { return static_cast<long>(params_.size()); }
  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  /// Seeded initialization: weights uniform in +-sqrt(6 / (n_in + n_out))
  /// per layer, biases zero.
  void init_uniform(std::mt19937_64& rng);

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
  /// Columns are samples.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  /// Mean over the batch of 0.5 * ||forward(x) - target||^2 and its exact
  /// reverse-mode gradient with respect to the parameters.
  double gradient(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                  Eigen::VectorXd& grad_out) const;

 private:
  struct LayerView {
    Eigen::Map<const Eigen::MatrixXd> weight;
    Eigen::Map<const Eigen::VectorXd> bias;
  };
  LayerView layer(int l) const;

  std::vector<int> layer_sizes_;
  std::vector<Activation> activations_;
  std::vector<SkipConnection> skips_;
  std::vector<long> offsets_;  // parameter offset of each layer
  Eigen::VectorXd params_;
};

}  // namespace eea
