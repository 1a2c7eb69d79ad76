#pragma once

#include <random>

#include "eea/env.hpp"

namespace eea {

namespace cartpole_action {
constexpr int kLeft = 0;
constexpr int kRight = 1;
constexpr int kCount = 2;
}  // namespace cartpole_action

/// Classic cart-pole balancing task. State is (position, velocity, angle,
/// angular velocity); actions push the cart left or right with a fixed
/// force; dynamics advance by one explicit Euler step of length tau. Reward
/// is 1 per live step; the episode ends when the pole or cart leaves the
/// termination bounds or after `step_cap` steps.
class CartpoleEnv final : public Env {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  static constexpr double kHalfLength = 0.5;
  static constexpr double kForce = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kAngleBound = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
  static constexpr double kPositionBound = 2.4;
  static constexpr int kDefaultStepCap = 200;

  explicit CartpoleEnv(int step_cap = kDefaultStepCap) : step_cap_(step_cap) {}

  int action_count() const override { return cartpole_action::kCount; }
  ObservationSpec observation_spec() const override { return {ObservationKind::Vector, 4}; }
  Observation reset(std::uint64_t seed) override;
  StepResult step(int action) override;

  /// Pure one-step dynamics, shared with tests and oracles.
  static Eigen::Vector4d dynamics_step(const Eigen::Vector4d& state, int action);

  const Eigen::Vector4d& state() const { return state_; }
  void set_state(const Eigen::Vector4d& state);

 private:
  int step_cap_;
  Eigen::Vector4d state_ = Eigen::Vector4d::Zero();
  std::mt19937_64 rng_;
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace eea
