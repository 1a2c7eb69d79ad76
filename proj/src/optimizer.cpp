#include "eea/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace eea {

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  if (name == "rmsprop") return OptimizerKind::RmsProp;
  throw std::invalid_argument("unknown optimizer: " + name);
}

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::Sgd: return "sgd";
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::RmsProp: return "rmsprop";
  }
  return "sgd";
}

OptimizerState OptimizerState::sgd(double step_size) {
  OptimizerState opt;
  opt.kind = OptimizerKind::Sgd;
  opt.step_size = step_size;
  return opt;
}

OptimizerState OptimizerState::adam(double step_size, double beta1, double beta2,
                                    double epsilon) {
  OptimizerState opt;
  opt.kind = OptimizerKind::Adam;
  opt.step_size = step_size;
  opt.beta1 = beta1;
  opt.beta2 = beta2;
  opt.epsilon = epsilon;
  return opt;
}

OptimizerState OptimizerState::rmsprop(double step_size, double decay, double epsilon) {
  OptimizerState opt;
  opt.kind = OptimizerKind::RmsProp;
  opt.step_size = step_size;
  opt.decay = decay;
  opt.epsilon = epsilon;
  return opt;
}

OptimizerState OptimizerState::make(OptimizerKind kind, double step_size) {
  switch (kind) {
    case OptimizerKind::Sgd: return sgd(step_size);
    case OptimizerKind::Adam: return adam(step_size);
    case OptimizerKind::RmsProp: return rmsprop(step_size);
  }
  return sgd(step_size);
}

void apply_update(OptimizerState& opt, Eigen::VectorXd& params, const Eigen::VectorXd& grads) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("apply_update: parameter/gradient length mismatch");
  }
  switch (opt.kind) {
    case OptimizerKind::Sgd:
      params -= opt.step_size * grads;
      return;
    case OptimizerKind::Adam: {
      if (opt.first_moment.size() == 0) {
        opt.first_moment = Eigen::VectorXd::Zero(params.size());
        opt.second_moment = Eigen::VectorXd::Zero(params.size());
      }
      if (opt.first_moment.size() != params.size()) {
        throw std::invalid_argument("apply_update: moment buffers sized to other parameters");
      }
      ++opt.step_count;
      opt.first_moment = opt.beta1 * opt.first_moment + (1.0 - opt.beta1) * grads;
      opt.second_moment =
          (opt.beta2 * opt.second_moment.array() + (1.0 - opt.beta2) * grads.array().square())
              .matrix();
      const double bias1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step_count));
      const double bias2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step_count));
      params.array() -= opt.step_size * (opt.first_moment.array() / bias1) /
                        ((opt.second_moment.array() / bias2).sqrt() + opt.epsilon);
      return;
    }
    case OptimizerKind::RmsProp: {
      if (opt.second_moment.size() == 0) {
        opt.second_moment = Eigen::VectorXd::Zero(params.size());
      }
      if (opt.second_moment.size() != params.size()) {
        throw std::invalid_argument("apply_update: moment buffers sized to other parameters");
      }
      ++opt.step_count;
      opt.second_moment =
          (opt.decay * opt.second_moment.array() + (1.0 - opt.decay) * grads.array().square())
              .matrix();
      params.array() -=
          opt.step_size * grads.array() / (opt.second_moment.array().sqrt() + opt.epsilon);
      return;
    }
  }
}

}  // namespace eea
