#include "eea/maze.hpp"

#include <stdexcept>

namespace eea {

bool MazeLayout::obstacle(int row, int col) const {
  for (const auto& cell : obstacles) {
    if (cell.first == row && cell.second == col) return true;
  }
  return false;
}

int MazeLayout::state_index(int row, int col) const {
  if (!free_cell(row, col)) throw std::invalid_argument("MazeLayout: not a free cell");
  int index = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!free_cell(r, c)) continue;
      if (r == row && c == col) return index;
      ++index;
    }
  }
  throw std::logic_error("MazeLayout: unreachable");
}

std::pair<int, int> MazeLayout::cell_of(int state) const {
  int index = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!free_cell(r, c)) continue;
      if (index == state) return {r, c};
      ++index;
    }
  }
  throw std::invalid_argument("MazeLayout: state index out of range");
}

int MazeLayout::state_count() const {
  int count = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (free_cell(r, c)) ++count;
    }
  }
  return count;
}

std::pair<int, int> MazeLayout::move(std::pair<int, int> cell, int action) const {
  auto [row, col] = cell;
  switch (action) {
    case maze_action::kUp: --row; break;
    case maze_action::kDown: ++row; break;
    case maze_action::kLeft: --col; break;
    case maze_action::kRight: ++col; break;
    default: throw std::invalid_argument("MazeLayout::move: invalid action index");
  }
  return free_cell(row, col) ? std::pair<int, int>{row, col} : cell;
}

MazeEnv::MazeEnv(MazeLayout layout, bool one_hot)
    : layout_(std::move(layout)), one_hot_(one_hot), cell_(layout_.start) {}

ObservationSpec MazeEnv::observation_spec() const {
  return {ObservationKind::Discrete, layout_.state_count()};
}

Observation MazeEnv::observe() const {
  Observation obs;
  obs.index = layout_.state_index(cell_.first, cell_.second);
  if (one_hot_) {
    obs.vec = Eigen::VectorXd::Zero(layout_.state_count());
    obs.vec(obs.index) = 1.0;
  }
  return obs;
}

Observation MazeEnv::reset(std::uint64_t) {
  cell_ = layout_.start;
  done_ = false;
  return observe();
}

StepResult MazeEnv::step(int action) {
  if (done_) throw std::logic_error("MazeEnv::step: episode already finished");
  cell_ = layout_.move(cell_, action);
  StepResult result;
  result.done = cell_ == layout_.goal;
  result.reward = result.done ? 1.0 : 0.0;
  done_ = result.done;
  result.obs = observe();
  return result;
}

TabularMDP maze_tabular_mdp(const MazeLayout& layout, double discount) {
  const int states = layout.state_count();
  TabularMDP mdp = TabularMDP::zeros(states, maze_action::kCount, discount);
  mdp.initial_state = layout.state_index(layout.start.first, layout.start.second);
  const int goal = layout.state_index(layout.goal.first, layout.goal.second);

  for (int s = 0; s < states; ++s) {
    auto cell = layout.cell_of(s);
    for (int a = 0; a < maze_action::kCount; ++a) {
      auto next_cell = layout.move(cell, a);
      int next = layout.state_index(next_cell.first, next_cell.second);
      mdp.set_deterministic(s, a, next, next == goal ? 1.0 : 0.0);
    }
  }
  mdp.make_terminal(goal);
  mdp.validate();
  return mdp;
}

}  // namespace eea
