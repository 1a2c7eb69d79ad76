#pragma once

#include <random>
#include <utility>

#include "eea/env.hpp"

namespace eea {

namespace predprey_action {
constexpr int kUp = 0;
constexpr int kDown = 1;
constexpr int kLeft = 2;
constexpr int kRight = 3;
constexpr int kStay = 4;
constexpr int kCount = 5;
}  // namespace predprey_action

/// Stochastic pursuit on a 7x7 grid. The agent moves deterministically
/// (blocked at the borders), then the prey moves uniformly at random among
/// its in-bounds neighbour cells and staying put. Catching the prey (cells
/// coincide after both moves) gives reward 1 and ends the episode; a step
/// cap applies.
///
/// Observations are a 7x7x3 binary tensor flattened channel-major to a
/// 147-vector: agent plane, prey plane, wall/border plane.
class PredPreyEnv final : public Env {
 public:
  static constexpr int kGrid = 7;
  static constexpr int kChannels = 3;
  static constexpr int kObsSize = kGrid * kGrid * kChannels;
  static constexpr int kDefaultStepCap = 100;

  explicit PredPreyEnv(int step_cap = kDefaultStepCap) : step_cap_(step_cap) {}

  int action_count() const override { return predprey_action::kCount; }
  ObservationSpec observation_spec() const override {
    return {ObservationKind::Vector, kObsSize};
  }
  Observation reset(std::uint64_t seed) override;
  StepResult step(int action) override;

  std::pair<int, int> agent_cell() const { return agent_; }
  std::pair<int, int> prey_cell() const { return prey_; }
  /// Places both participants directly; used by tests and tabularization.
  void set_state(std::pair<int, int> agent, std::pair<int, int> prey);

  static bool in_bounds(int row, int col) {
    return row >= 0 && row < kGrid && col >= 0 && col < kGrid;
  }
  /// Deterministic agent move; moving off the grid leaves the cell unchanged.
  static std::pair<int, int> agent_move(std::pair<int, int> cell, int action);
  /// The prey's legal move set: in-bounds neighbour cells plus staying put.
  static std::vector<std::pair<int, int>> prey_moves(std::pair<int, int> cell);

  Observation observe() const;

 private:
  int step_cap_;
  std::pair<int, int> agent_{0, 0};
  std::pair<int, int> prey_{kGrid - 1, kGrid - 1};
  std::mt19937_64 rng_;
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace eea
