#include "eea/predator_prey.hpp"

#include <stdexcept>

namespace eea {

std::pair<int, int> PredPreyEnv::agent_move(std::pair<int, int> cell, int action) {
  auto [row, col] = cell;
  switch (action) {
    case predprey_action::kUp: --row; break;
    case predprey_action::kDown: ++row; break;
    case predprey_action::kLeft: --col; break;
    case predprey_action::kRight: ++col; break;
    case predprey_action::kStay: break;
    default: throw std::invalid_argument("PredPreyEnv: invalid action index");
  }
  return in_bounds(row, col) ? std::pair<int, int>{row, col} : cell;
}

std::vector<std::pair<int, int>> PredPreyEnv::prey_moves(std::pair<int, int> cell) {
  std::vector<std::pair<int, int>> moves;
  const int offsets[5][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}, {0, 0}};
  for (const auto& off : offsets) {
    int row = cell.first + off[0];
    int col = cell.second + off[1];
    if (in_bounds(row, col)) moves.emplace_back(row, col);
  }
  return moves;
}

Observation PredPreyEnv::observe() const {
  Observation obs;
  obs.vec = Eigen::VectorXd::Zero(kObsSize);
  obs.vec(agent_.first * kGrid + agent_.second) = 1.0;
  obs.vec(kGrid * kGrid + prey_.first * kGrid + prey_.second) = 1.0;
  // Wall plane: the border ring.
  for (int r = 0; r < kGrid; ++r) {
    for (int c = 0; c < kGrid; ++c) {
      if (r == 0 || c == 0 || r == kGrid - 1 || c == kGrid - 1) {
        obs.vec(2 * kGrid * kGrid + r * kGrid + c) = 1.0;
      }
    }
  }
  return obs;
}

Observation PredPreyEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  std::uniform_int_distribution<int> coord(0, kGrid - 1);
  agent_ = {coord(rng_), coord(rng_)};
  do {
    prey_ = {coord(rng_), coord(rng_)};
  } while (prey_ == agent_);
  steps_ = 0;
  done_ = false;
  return observe();
}

void PredPreyEnv::set_state(std::pair<int, int> agent, std::pair<int, int> prey) {
  if (!in_bounds(agent.first, agent.second) || !in_bounds(prey.first, prey.second)) {
    throw std::invalid_argument("PredPreyEnv::set_state: cell out of bounds");
  }
  agent_ = agent;
  prey_ = prey;
  steps_ = 0;
  done_ = false;
}

StepResult PredPreyEnv::step(int action) {
  if (done_) throw std::logic_error("PredPreyEnv::step: episode already finished");
  agent_ = agent_move(agent_, action);
  auto moves = prey_moves(prey_);
  std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
  prey_ = moves[pick(rng_)];
  ++steps_;

  StepResult result;
  const bool caught = agent_ == prey_;
  result.reward = caught ? 1.0 : 0.0;
  result.done = caught || steps_ >= step_cap_;
  done_ = result.done;
  result.obs = observe();
  return result;
}

}  // namespace eea
