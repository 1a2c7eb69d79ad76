#pragma once

#include <Eigen/Dense>
#include <string>

namespace eea {

enum class OptimizerKind { Sgd, Adam, RmsProp };

OptimizerKind optimizer_from_string(const std::string& name);
std::string to_string(OptimizerKind kind);

/// Optimizer state with moment buffers sized to the parameter vector on
/// first use. Adam uses bias correction; RMSprop keeps a decayed mean of
/// squared gradients.
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::Sgd;
  double step_size = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double decay = 0.99;  // RMSprop
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  long step_count = 0;

  static OptimizerState sgd(double step_size);
  static OptimizerState adam(double step_size, double beta1 = 0.9, double beta2 = 0.999,
                             double epsilon = 1e-8);
  static OptimizerState rmsprop(double step_size, double decay = 0.99, double epsilon = 1e-8);
  static OptimizerState make(OptimizerKind kind, double step_size);
};

/// One optimizer step in place. Throws on parameter/gradient length mismatch.
void apply_update(OptimizerState& opt, Eigen::VectorXd& params, const Eigen::VectorXd& grads);

}  // namespace eea
