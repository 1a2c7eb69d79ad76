#include <doctest.h>

#include <array>
#include <cmath>
#include <map>

#include "eea/cartpole.hpp"
#include "eea/maze.hpp"
#include "eea/predator_prey.hpp"
#include "oracles.hpp"

using namespace eea;

TEST_SUITE("envs") {

TEST_CASE("maze: blocked moves leave the cell unchanged") {
  MazeLayout layout;
  // Outer wall.
  CHECK(layout.move({5, 0}, maze_action::kDown) == std::pair{5, 0});
  CHECK(layout.move({2, 0}, maze_action::kLeft) == std::pair{2, 0});
  // Obstacle at (1, 2).
  CHECK(layout.move({1, 1}, maze_action::kRight) == std::pair{1, 1});
}

TEST_CASE("maze: start cell moves down one row") {
  MazeEnv env;
  Observation obs = env.reset(0);
  CHECK(obs.index == env.layout().state_index(2, 0));
  StepResult result = env.step(maze_action::kDown);
  CHECK(result.obs.index == env.layout().state_index(3, 0));
  CHECK(result.reward == 0.0);
  CHECK_FALSE(result.done);
}

TEST_CASE("maze: BFS-optimal action sequence finishes with total reward 1") {
  MazeLayout layout;
  const int optimal = oracle::bfs_shortest_path(layout, layout.start, layout.goal);
  REQUIRE(optimal > 0);

  // Recover one optimal action sequence by greedy descent on BFS distances.
  auto distance_to_goal = [&](std::pair<int, int> cell) {
    return oracle::bfs_shortest_path(layout, cell, layout.goal);
  };
  MazeEnv env;
  env.reset(0);
  double total = 0.0;
  int steps = 0;
  auto cell = layout.start;
  bool done = false;
  while (!done) {
    REQUIRE(steps <= optimal);
    int best_action = -1;
    int best_dist = distance_to_goal(cell);
    for (int a = 0; a < maze_action::kCount; ++a) {
      auto next = layout.move(cell, a);
      if (next == cell) continue;
      if (distance_to_goal(next) < best_dist) {
        best_dist = distance_to_goal(next);
        best_action = a;
      }
    }
    REQUIRE(best_action >= 0);
    StepResult result = env.step(best_action);
    cell = layout.move(cell, best_action);
    total += result.reward;
    done = result.done;
    ++steps;
  }
  CHECK(steps == optimal);
  CHECK(total == 1.0);
}

TEST_CASE("maze: invalid action and stepping after done raise") {
  MazeEnv env;
  env.reset(0);
  CHECK_THROWS_AS(env.step(7), std::invalid_argument);
  MazeEnv fresh;
  CHECK_THROWS_AS(fresh.step(0), std::logic_error);  // never reset
}

TEST_CASE("maze: tabularization agrees with the environment everywhere") {
  MazeLayout layout;
  TabularMDP mdp = maze_tabular_mdp(layout);
  CHECK(mdp.state_count == layout.state_count());
  CHECK(mdp.deterministic());

  for (int s = 0; s < mdp.state_count; ++s) {
    if (mdp.is_terminal(s)) continue;
    auto cell = layout.cell_of(s);
    for (int a = 0; a < maze_action::kCount; ++a) {
      auto next_cell = layout.move(cell, a);
      const int expected_next = layout.state_index(next_cell.first, next_cell.second);
      CHECK(mdp.successor(s, a) == expected_next);
      const double expected_reward = next_cell == layout.goal ? 1.0 : 0.0;
      CHECK(mdp.reward_for(s, a, expected_next) == expected_reward);
    }
  }
  const int goal = layout.state_index(layout.goal.first, layout.goal.second);
  CHECK(mdp.is_terminal(goal));
}

TEST_CASE("maze: one-hot observation mode") {
  MazeEnv env(MazeLayout{}, /*one_hot=*/true);
  Observation obs = env.reset(0);
  CHECK(obs.vec.size() == env.layout().state_count());
  CHECK(obs.vec.sum() == 1.0);
  CHECK(obs.vec(obs.index) == 1.0);
}

TEST_CASE("cartpole: zero velocities keep position and angle for one step") {
  CartpoleEnv env;
  env.reset(1);
  Eigen::Vector4d state;
  state << 0.3, 0.0, 0.05, 0.0;
  env.set_state(state);
  StepResult result = env.step(cartpole_action::kRight);
  CHECK(result.obs.vec(0) == 0.3);   // x' = x + tau * 0
  CHECK(result.obs.vec(2) == 0.05);  // theta' = theta + tau * 0
}

TEST_CASE("cartpole: matches the independent Euler reimplementation per step") {
  CartpoleEnv env;
  Observation obs = env.reset(7);
  std::array<double, 4> ref{obs.vec(0), obs.vec(1), obs.vec(2), obs.vec(3)};
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, 1);
  bool done = false;
  for (int step = 0; step < 200 && !done; ++step) {
    const int action = pick(rng);
    ref = oracle::cartpole_euler_step(ref, action);
    StepResult result = env.step(action);
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(result.obs.vec(i) - ref[i]) < 1e-6);
    }
    done = result.done;
  }
}

TEST_CASE("cartpole: constant rightward force tips the pole negative, then out") {
  // Reference-integrator check: from the exact upright state a constant
  // rightward push drives the angle strictly negative until termination.
  std::array<double, 4> ref{0, 0, 0, 0};
  CartpoleEnv env;
  env.reset(1);
  env.set_state(Eigen::Vector4d::Zero());
  bool done = false;
  int steps = 0;
  double prev_theta = 0.0;
  while (!done) {
    REQUIRE(steps < 200);
    ref = oracle::cartpole_euler_step(ref, cartpole_action::kRight);
    StepResult result = env.step(cartpole_action::kRight);
    CHECK(std::abs(result.obs.vec(2) - ref[2]) < 1e-6);
    if (steps > 0) CHECK(result.obs.vec(2) <= prev_theta);  // angle keeps falling
    prev_theta = result.obs.vec(2);
    done = result.done;
    ++steps;
  }
  CHECK(prev_theta < -CartpoleEnv::kAngleBound);  // left through the angle bound
  CHECK(steps < 200);
}

TEST_CASE("cartpole: untouched pole at small positive angle falls before the cap") {
  CartpoleEnv env;
  env.reset(1);
  Eigen::Vector4d state;
  state << 0.0, 0.0, 0.02, 0.0;
  env.set_state(state);
  // Alternate pushes cancel on average; gravity still wins.
  int steps = 0;
  bool done = false;
  while (!done) {
    REQUIRE(steps < 200);
    StepResult result = env.step(steps % 2 == 0 ? cartpole_action::kLeft
                                                : cartpole_action::kRight);
    done = result.done;
    ++steps;
  }
  CHECK(steps < 200);
}

TEST_CASE("cartpole: per-step change bounded by tau times the derivative bound") {
  // With |theta_dot| <= 10 along the trajectory, |x_acc| and |theta_acc|
  // stay below 50 (direct bound on the dynamics equations), so each
  // component moves by at most tau * max(|velocity|, 50).
  CartpoleEnv env;
  Observation obs = env.reset(11);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, 1);
  bool done = false;
  while (!done) {
    Eigen::Vector4d before = obs.vec;
    REQUIRE(std::abs(before(3)) <= 10.0);
    StepResult result = env.step(pick(rng));
    const Eigen::Vector4d delta = result.obs.vec - before;
    CHECK(std::abs(delta(0)) <= CartpoleEnv::kTau * std::abs(before(1)) + 1e-15);
    CHECK(std::abs(delta(2)) <= CartpoleEnv::kTau * std::abs(before(3)) + 1e-15);
    CHECK(std::abs(delta(1)) <= CartpoleEnv::kTau * 50.0);
    CHECK(std::abs(delta(3)) <= CartpoleEnv::kTau * 50.0);
    obs = result.obs;
    done = result.done;
  }
}

TEST_CASE("cartpole: reward 1 per live step and cap termination") {
  CartpoleEnv env(25);
  env.reset(2);
  env.set_state(Eigen::Vector4d::Zero());
  double total = 0.0;
  int steps = 0;
  bool done = false;
  while (!done) {
    // Bang-bang balance keeps the pole alive until the cap.
    StepResult result = env.step(env.state()(2) > 0 ? cartpole_action::kRight
                                                    : cartpole_action::kLeft);
    total += result.reward;
    done = result.done;
    ++steps;
  }
  CHECK(steps == 25);
  CHECK(total == 25.0);
}

TEST_CASE("predprey: border moves are blocked") {
  PredPreyEnv env;
  env.reset(3);
  env.set_state({0, 0}, {6, 6});
  StepResult result = env.step(predprey_action::kUp);
  CHECK(env.agent_cell() == std::pair{0, 0});
  CHECK_FALSE(result.done);
}

TEST_CASE("predprey: observation carries exactly one agent and one prey bit") {
  PredPreyEnv env;
  Observation obs = env.reset(17);
  const int cells = PredPreyEnv::kGrid * PredPreyEnv::kGrid;
  CHECK(obs.vec.segment(0, cells).sum() == 1.0);
  CHECK(obs.vec.segment(cells, cells).sum() == 1.0);
  bool done = false;
  for (int step = 0; step < 30 && !done; ++step) {
    StepResult result = env.step(step % predprey_action::kCount);
    CHECK(result.obs.vec.segment(0, cells).sum() == 1.0);
    CHECK(result.obs.vec.segment(cells, cells).sum() == 1.0);
    done = result.done;
  }
}

TEST_CASE("predprey: prey move from a centre cell is uniform over 5 options") {
  PredPreyEnv env(1000000);
  env.reset(23);
  const int trials = 100000;
  std::map<std::pair<int, int>, int> counts;
  for (int t = 0; t < trials; ++t) {
    env.set_state({0, 0}, {3, 3});
    env.step(predprey_action::kStay);
    counts[env.prey_cell()]++;
  }
  REQUIRE(counts.size() == 5);
  // Chi-square against uniform; critical value for df = 4 at 0.001 is 18.47.
  const double expected = trials / 5.0;
  double chi2 = 0.0;
  for (const auto& [cell, n] : counts) {
    chi2 += (n - expected) * (n - expected) / expected;
  }
  CHECK(chi2 < 18.47);
}

TEST_CASE("predprey: cornered prey is caught with the enumerated probability") {
  PredPreyEnv env(1000000);
  env.reset(29);
  // Prey cornered at (0,0): legal set {down, right, stay}, so the waiting
  // agent at (0,1) catches with probability exactly 1/3.
  const auto moves = PredPreyEnv::prey_moves({0, 0});
  REQUIRE(moves.size() == 3);
  const double p = 1.0 / 3.0;
  const int trials = 100000;
  int catches = 0;
  for (int t = 0; t < trials; ++t) {
    env.set_state({0, 1}, {0, 0});
    StepResult result = env.step(predprey_action::kStay);
    if (result.reward == 1.0) ++catches;
  }
  const double freq = static_cast<double>(catches) / trials;
  const double sigma = std::sqrt(p * (1.0 - p) / trials);
  CHECK(std::abs(freq - p) < 3.0 * sigma);
}

TEST_CASE("predprey: catch gives reward 1 and ends the episode") {
  PredPreyEnv env;
  env.reset(31);
  int guard = 0;
  for (;;) {
    REQUIRE(++guard < 100000);
    env.set_state({3, 2}, {3, 3});
    StepResult result = env.step(predprey_action::kRight);  // agent steps onto the prey
    if (result.done) {
      CHECK(result.reward == 1.0);
      CHECK(env.agent_cell() == env.prey_cell());
      CHECK_THROWS_AS(env.step(predprey_action::kStay), std::logic_error);
      break;
    }
  }
}

TEST_CASE("seed determinism: identical seed and actions give identical traces") {
  auto trace = [](Env& env, std::uint64_t seed) {
    std::vector<double> record;
    Observation obs = env.reset(seed);
    if (obs.vec.size() > 0) {
      record.insert(record.end(), obs.vec.data(), obs.vec.data() + obs.vec.size());
    }
    record.push_back(obs.index);
    std::mt19937_64 rng(400);
    std::uniform_int_distribution<int> pick(0, env.action_count() - 1);
    bool done = false;
    for (int i = 0; i < 40 && !done; ++i) {
      StepResult r = env.step(pick(rng));
      record.push_back(r.reward);
      record.push_back(r.done ? 1.0 : 0.0);
      if (r.obs.vec.size() > 0) {
        record.insert(record.end(), r.obs.vec.data(), r.obs.vec.data() + r.obs.vec.size());
      }
      done = r.done;
    }
    return record;
  };

  MazeEnv maze1, maze2;
  CHECK(trace(maze1, 5) == trace(maze2, 5));
  CartpoleEnv cart1, cart2;
  CHECK(trace(cart1, 5) == trace(cart2, 5));
  PredPreyEnv prey1, prey2, prey3;
  CHECK(trace(prey1, 5) == trace(prey2, 5));
  CHECK(trace(prey1, 5) != trace(prey3, 6));
}

}  // TEST_SUITE
