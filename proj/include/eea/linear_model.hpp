#pragma once

#include <Eigen/Dense>
#include <random>

#include "eea/optimizer.hpp"

namespace eea {

/// Affine map y = W x + b.
struct LinearModel {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;

  LinearModel() = default;
  LinearModel(int out, int in)
      : weight(Eigen::MatrixXd::Zero(out, in)), bias(Eigen::VectorXd::Zero(out)) {}

  int input_size() const { return static_cast<int>(weight.cols()); }
  int output_size() const { return static_cast<int>(weight.rows()); }
  long param_count() const { return weight.size() + bias.size(); }

  Eigen::VectorXd predict(const Eigen::VectorXd& input) const { return weight * input + bias; }
  Eigen::MatrixXd predict_batch(const Eigen::MatrixXd& inputs) const {
    return (weight * inputs).colwise() + bias;
  }

  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& params);
  void init_uniform(std::mt19937_64& rng);

  /// Mean over the batch of 0.5 * ||predict(x) - t||^2 and its gradient in
  /// flattened layout.
  double gradient(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                  Eigen::VectorXd& grad_out) const;
};

/// Trains by seeded mini-batch gradient steps and returns the final mean
/// squared error over the full dataset (mean of squared Euclidean residual
/// norms). Throws on an empty dataset.
double fit_linear(LinearModel& model, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& targets, OptimizerState& opt, int epochs,
                  int batch_size, std::mt19937_64& rng);

/// Mean squared error of the model over a dataset.
double mean_squared_error(const LinearModel& model, const Eigen::MatrixXd& inputs,
                          const Eigen::MatrixXd& targets);

}  // namespace eea
