#pragma once

#include <utility>
#include <vector>

#include "eea/env.hpp"
#include "eea/mdp.hpp"

namespace eea {

namespace maze_action {
constexpr int kUp = 0;
constexpr int kDown = 1;
constexpr int kLeft = 2;
constexpr int kRight = 3;
constexpr int kCount = 4;
}  // namespace maze_action

/// The 6x9 Dyna maze: start on the far west, goal in the north-east corner,
/// three obstacle groups in between. Cells are (row, col) with row 0 at the
/// top. Reward 1 on reaching the goal, 0 otherwise.
struct MazeLayout {
  int rows = 6;
  int cols = 9;
  std::pair<int, int> start{2, 0};
  std::pair<int, int> goal{0, 8};
  std::vector<std::pair<int, int>> obstacles{{1, 2}, {2, 2}, {3, 2}, {4, 5},
                                             {0, 7}, {1, 7}, {2, 7}};

  bool in_bounds(int row, int col) const {
    return row >= 0 && row < rows && col >= 0 && col < cols;
  }
  bool obstacle(int row, int col) const;
  bool free_cell(int row, int col) const { return in_bounds(row, col) && !obstacle(row, col); }

  /// Dense state index of a free cell; obstacle cells are not states.
  int state_index(int row, int col) const;
  std::pair<int, int> cell_of(int state) const;
  int state_count() const;

  /// One move with blocked moves (walls and obstacles) leaving the cell
  /// unchanged. Pure function shared by the environment and tabularization.
  std::pair<int, int> move(std::pair<int, int> cell, int action) const;
};

class MazeEnv final : public Env {
 public:
  explicit MazeEnv(MazeLayout layout = MazeLayout{}, bool one_hot = false);

  int action_count() const override { return maze_action::kCount; }
  ObservationSpec observation_spec() const override;
  Observation reset(std::uint64_t seed) override;
  StepResult step(int action) override;

  const MazeLayout& layout() const { return layout_; }
  std::pair<int, int> cell() const { return cell_; }

 private:
  Observation observe() const;

  MazeLayout layout_;
  bool one_hot_;
  std::pair<int, int> cell_;
  bool done_ = true;
};

/// Exhaustive tabularization of the maze: states are the free cells,
/// actions follow maze_action order, the goal is terminal. This is the
/// single source of truth shared with the environment via MazeLayout::move.
TabularMDP maze_tabular_mdp(const MazeLayout& layout = MazeLayout{}, double discount = 0.95);

}  // namespace eea
