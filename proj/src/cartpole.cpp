#include "eea/cartpole.hpp"

#include <cmath>
#include <stdexcept>

namespace eea {

Eigen::Vector4d CartpoleEnv::dynamics_step(const Eigen::Vector4d& state, int action) {
  if (action != cartpole_action::kLeft && action != cartpole_action::kRight) {
    throw std::invalid_argument("CartpoleEnv: invalid action index");
  }
  const double x = state(0), x_dot = state(1), theta = state(2), theta_dot = state(3);
  const double force = action == cartpole_action::kRight ? kForce : -kForce;
  const double total_mass = kCartMass + kPoleMass;
  const double pole_mass_length = kPoleMass * kHalfLength;

  const double cos_theta = std::cos(theta);
  const double sin_theta = std::sin(theta);
  const double temp = (force + pole_mass_length * theta_dot * theta_dot * sin_theta) / total_mass;
  const double theta_acc =
      (kGravity * sin_theta - cos_theta * temp) /
      (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_theta * cos_theta / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_theta / total_mass;

  Eigen::Vector4d next;
  next << x + kTau * x_dot, x_dot + kTau * x_acc, theta + kTau * theta_dot,
      theta_dot + kTau * theta_acc;
  return next;
}

Observation CartpoleEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  std::uniform_real_distribution<double> init(-0.05, 0.05);
  for (int i = 0; i < 4; ++i) state_(i) = init(rng_);
  steps_ = 0;
  done_ = false;
  Observation obs;
  obs.vec = state_;
  return obs;
}

void CartpoleEnv::set_state(const Eigen::Vector4d& state) {
  state_ = state;
  steps_ = 0;
  done_ = false;
}

StepResult CartpoleEnv::step(int action) {
  if (done_) throw std::logic_error("CartpoleEnv::step: episode already finished");
  state_ = dynamics_step(state_, action);
  ++steps_;

  const bool out_of_bounds = std::abs(state_(0)) > kPositionBound ||
                             std::abs(state_(2)) > kAngleBound;
  StepResult result;
  result.reward = 1.0;
  result.done = out_of_bounds || steps_ >= step_cap_;
  done_ = result.done;
  result.obs.vec = state_;
  return result;
}

}  // namespace eea
