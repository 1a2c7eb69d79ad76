#include <doctest.h>

#include <cmath>
#include <set>

#include "eea/dp.hpp"
#include "eea/dqn.hpp"
#include "eea/dynamics.hpp"
#include "eea/maze.hpp"
#include "eea/replay.hpp"
#include "eea/rng.hpp"
#include "eea/tabular_agents.hpp"
#include "oracles.hpp"

using namespace eea;

namespace {

AgentConfig maze_config() {
  AgentConfig cfg;
  cfg.alpha = 0.1;
  cfg.gamma = 0.95;
  cfg.epsilon = 0.1;
  return cfg;
}

EeaQLearningAgent make_eea_agent(const TabularMDP& mdp, AgentConfig cfg,
                                 int a_hyp = maze_action::kLeft) {
  return EeaQLearningAgent(mdp.state_count, mdp.action_count, a_hyp, make_exact_forward(mdp),
                           make_exact_backward(mdp), cfg);
}

}  // namespace

TEST_SUITE("agents") {

TEST_CASE("eea_q_values: zero table gives the zero vector") {
  TabularMDP mdp = maze_tabular_mdp();
  EeaQLearningAgent agent = make_eea_agent(mdp, maze_config());
  for (int s = 0; s < mdp.state_count; ++s) {
    for (double v : agent.q_values(s)) CHECK(v == 0.0);
  }
}

TEST_CASE("eea_q_values: hypothetical-action entry is a direct read") {
  TabularMDP mdp = maze_tabular_mdp();
  std::vector<double> hyp_table(mdp.state_count);
  for (int s = 0; s < mdp.state_count; ++s) hyp_table[s] = 0.125 * s;
  auto values = eea_q_values(
      17, mdp.action_count, [&](int s) { return hyp_table[s]; },
      [](int, int) { return -1.0; }, make_exact_forward(mdp), make_exact_backward(mdp),
      maze_action::kLeft);
  CHECK(values[maze_action::kLeft] == hyp_table[17]);  // bit-identical
}

TEST_CASE("q-learning update: single terminal step moves Q by alpha * r") {
  AgentConfig cfg = maze_config();
  QLearningAgent agent(4, 2, cfg);
  agent.update(1, 0, 1.0, 2, /*done=*/true);
  CHECK(agent.table().values(1, 0) == 0.1);
  CHECK(agent.table().visits(1, 0) == 1);

  TabularMDP mdp = maze_tabular_mdp();
  EeaQLearningAgent eea = make_eea_agent(mdp, cfg);
  const int s = 10;
  eea.update(s, maze_action::kLeft, 1.0, mdp.successor(s, maze_action::kLeft), true);
  CHECK(eea.q_values(s)[maze_action::kLeft] == 0.1);  // identity slot
}

TEST_CASE("planning backup on a terminal-adjacent pair sets Q to alpha * r") {
  TabularMDP chain = TabularMDP::zeros(2, 1, 0.95);
  chain.set_deterministic(0, 0, 1, 1.0);
  chain.make_terminal(1);
  AgentConfig cfg = maze_config();
  QLearningAgent agent(2, 1, cfg);
  auto pairs = non_terminal_pairs(chain);
  REQUIRE(pairs.size() == 1);
  auto rng = make_rng(1);
  q_planning_step(agent, chain, pairs, rng);
  CHECK(agent.table().values(0, 0) == 0.1);
}

TEST_CASE("vanilla Q-planning converges to the value-iteration oracle") {
  TabularMDP mdp = maze_tabular_mdp();
  AgentConfig cfg = maze_config();
  cfg.alpha = 0.5;
  QLearningAgent agent(mdp.state_count, mdp.action_count, cfg);
  auto pairs = non_terminal_pairs(mdp);
  auto rng = make_rng(7);
  for (int backup = 0; backup < 150000; ++backup) q_planning_step(agent, mdp, pairs, rng);

  QTable oracle_q = value_iteration(mdp, 1e-10);
  double worst = 0.0;
  for (auto [s, a] : pairs) {
    worst = std::max(worst, std::abs(agent.table().values(s, a) - oracle_q.values(s, a)));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("EEA and vanilla planning agree greedily after convergence") {
  TabularMDP mdp = maze_tabular_mdp();
  AgentConfig cfg = maze_config();
  cfg.alpha = 0.5;
  QLearningAgent vanilla(mdp.state_count, mdp.action_count, cfg);
  EeaQLearningAgent eea = make_eea_agent(mdp, cfg);
  auto pairs = non_terminal_pairs(mdp);
  auto rng_v = make_rng(7), rng_e = make_rng(7);
  for (int backup = 0; backup < 150000; ++backup) {
    q_planning_step(vanilla, mdp, pairs, rng_v);
    q_planning_step(eea, mdp, pairs, rng_e);
  }

  // Argmax agreement wherever the optimal action is unique by a margin;
  // near-ties depend on residual training error and are checked by value.
  QTable oracle_q = value_iteration(mdp, 1e-10);
  AssumptionAuditReport audit = assumption_audit(mdp, maze_action::kLeft);
  std::set<int> border(audit.states_without_hypothetical_predecessor.begin(),
                       audit.states_without_hypothetical_predecessor.end());
  int compared = 0;
  for (int s = 0; s < mdp.state_count; ++s) {
    if (mdp.is_terminal(s) || border.count(s)) continue;
    std::vector<double> star(mdp.action_count);
    for (int a = 0; a < mdp.action_count; ++a) star[a] = oracle_q.values(s, a);
    const int best =
        static_cast<int>(std::max_element(star.begin(), star.end()) - star.begin());
    double second = -1e100;
    for (int a = 0; a < mdp.action_count; ++a) {
      if (a != best) second = std::max(second, star[a]);
    }
    if (star[best] - second < 1e-2) continue;
    CAPTURE(s);
    CHECK(vanilla.greedy_action(s) == eea.greedy_action(s));
    CHECK(vanilla.greedy_action(s) == best);
    ++compared;
  }
  CHECK(compared >= 10);  // 12 non-border maze states have a unique optimum

  // Value equivalence at convergence: the full EEA vector matches the
  // value-iteration oracle everywhere the map applies.
  for (int s = 0; s < mdp.state_count; ++s) {
    if (mdp.is_terminal(s) || border.count(s)) continue;
    auto ev = eea.q_values(s);
    for (int a = 0; a < mdp.action_count; ++a) {
      CHECK(std::abs(ev[a] - oracle_q.values(s, a)) < 2e-3);
    }
  }
}

TEST_CASE("EEA planning reaches the greedy-optimal policy in fewer backups") {
  MazeLayout layout;
  TabularMDP mdp = maze_tabular_mdp(layout);
  const int optimal = oracle::bfs_shortest_path(layout, layout.start, layout.goal);
  auto pairs = non_terminal_pairs(mdp);
  AgentConfig cfg = maze_config();

  auto backups_to_optimal = [&](auto& agent, std::mt19937_64& rng) {
    for (int backup = 1; backup <= 40000; ++backup) {
      q_planning_step(agent, mdp, pairs, rng);
      if (backup % 50 == 0) {
        int state = mdp.initial_state;
        int steps = 0;
        while (steps <= optimal && !mdp.is_terminal(state)) {
          state = mdp.successor(state, agent.greedy_action(state));
          ++steps;
        }
        if (mdp.is_terminal(state) && steps == optimal) return backup;
      }
    }
    return 40001;
  };

  long vanilla_total = 0, eea_total = 0;
  for (int seed = 0; seed < 10; ++seed) {
    auto rng_v = make_rng(derive_seed(500, seed)), rng_e = make_rng(derive_seed(500, seed));
    QLearningAgent vanilla(mdp.state_count, mdp.action_count, cfg);
    EeaQLearningAgent eea = make_eea_agent(mdp, cfg);
    vanilla_total += backups_to_optimal(vanilla, rng_v);
    eea_total += backups_to_optimal(eea, rng_e);
  }
  CHECK(eea_total < vanilla_total);
}

TEST_CASE("EEA slot usage over full exploration matches the enumerated reduction") {
  TabularMDP mdp = maze_tabular_mdp();
  auto [reduced, map] = build_reduced_mdp(mdp, make_exact_forward(mdp),
                                          make_exact_backward(mdp), maze_action::kLeft);
  const ReducedSlotCount expected = count_reduced_q_slots(mdp, map);

  EeaQLearningAgent agent = make_eea_agent(mdp, maze_config());
  for (auto [s, a] : non_terminal_pairs(mdp)) {
    const int next = mdp.successor(s, a);
    agent.update(s, a, mdp.reward_for(s, a, next), next, mdp.is_terminal(next));
  }
  CHECK(agent.slots_written() == expected.total());
  CHECK(agent.slots_written() < static_cast<long>(mdp.state_count) * mdp.action_count);
  CHECK(agent.slots_written() == 92);  // frozen alongside the paper's 216 -> 67
}

TEST_CASE("epsilon 0 with unique maxima makes action selection a pure function") {
  TabularMDP mdp = maze_tabular_mdp();
  AgentConfig cfg = maze_config();
  cfg.epsilon = 0.0;
  QLearningAgent agent(mdp.state_count, mdp.action_count, cfg);
  // Give every state a unique maximizer; exact ties are broken at random
  // during exploration, so purity is stated for tie-free tables.
  for (int s = 0; s < mdp.state_count; ++s) {
    for (int a = 0; a < mdp.action_count; ++a) {
      agent.update(s, a, a == s % 4 ? 5.0 : 1.0, 0, true);
    }
  }
  auto rng1 = make_rng(1), rng2 = make_rng(999);
  for (int s = 0; s < mdp.state_count; ++s) {
    CHECK(agent.select_action(s, rng1) == agent.select_action(s, rng2));
    CHECK(agent.select_action(s, rng1) == agent.greedy_action(s));
    CHECK(agent.greedy_action(s) == s % 4);
  }
}

TEST_CASE("replay sampling is reproducible under a fixed seed") {
  ReplayBuffer buffer(16);
  for (int i = 0; i < 10; ++i) {
    Transition t;
    t.obs = Eigen::VectorXd::Constant(2, i);
    t.action = i;
    buffer.push(std::move(t));
  }
  auto rng1 = make_rng(42), rng2 = make_rng(42);
  CHECK(buffer.sample_indices(8, rng1) == buffer.sample_indices(8, rng2));

  ReplayBuffer small(4);
  for (int i = 0; i < 9; ++i) {
    Transition t;
    t.action = i;
    small.push(std::move(t));
  }
  CHECK(small.size() == 4);  // ring keeps the capacity bound
}

TEST_CASE("dqn: terminal batch with unit reward and zero net gives loss one half") {
  AgentConfig cfg;
  cfg.alpha = 0.001;
  cfg.gamma = 0.8;
  auto rng = make_rng(3);
  DqnAgent agent(4, 2, {8}, Activation::Tanh, cfg, rng);
  agent.online_net().params().setZero();
  agent.sync_target();

  std::vector<Transition> batch;
  for (int i = 0; i < 5; ++i) {
    Transition t;
    t.obs = Eigen::VectorXd::Random(4);
    t.action = i % 2;
    t.reward = 1.0;
    t.next_obs = Eigen::VectorXd::Random(4);
    t.done = true;
    batch.push_back(std::move(t));
  }
  const Eigen::VectorXd targets = agent.td_targets(batch);
  for (long i = 0; i < targets.size(); ++i) CHECK(targets(i) == 1.0);
  CHECK(agent.train_on_batch(batch) == 0.5);  // 0.5 * mean squared error
}

TEST_CASE("dqn: target network stays frozen between syncs") {
  AgentConfig cfg;
  cfg.alpha = 0.01;
  cfg.target_sync_period = 1000000;  // effectively never
  cfg.batch_size = 4;
  auto rng = make_rng(5);
  DqnAgent agent(3, 2, {16}, Activation::Tanh, cfg, rng);

  Eigen::MatrixXd probe = Eigen::MatrixXd::Random(3, 6);
  const Eigen::MatrixXd before = agent.target_net().forward_batch(probe);
  for (int i = 0; i < 20; ++i) {
    Transition t;
    t.obs = Eigen::VectorXd::Random(3);
    t.action = i % 2;
    t.reward = 1.0;
    t.next_obs = Eigen::VectorXd::Random(3);
    t.done = (i % 3 == 0);
    agent.observe(std::move(t));
    agent.train_step(rng);
  }
  const Eigen::MatrixXd after = agent.target_net().forward_batch(probe);
  CHECK(before == after);  // bit-identical
  agent.sync_target();
  CHECK(agent.target_net().forward_batch(probe) != before);
}

TEST_CASE("eea-dqn: TD targets match the tabular computation through exact models") {
  // 3x3 open grid, one-hot observations. With one-hot encodings the exact
  // forward and backward lookups are linear maps, so per-action linear
  // models reproduce them exactly and the agent's batched target
  // computation must equal the hand-rolled tabular one.
  const int grid = 3, states = grid * grid, actions = 4;
  auto move = [&](int s, int a) {
    int r = s / grid, c = s % grid;
    switch (a) {
      case 0: --r; break;
      case 1: ++r; break;
      case 2: --c; break;
      case 3: ++c; break;
    }
    if (r < 0 || r >= grid || c < 0 || c >= grid) return s;
    return r * grid + c;
  };
  const int a_hyp = 2;
  // Distinct-predecessor backward with self-hallucination where absent.
  auto backward = [&](int t) {
    for (int p = 0; p < states; ++p) {
      if (p != t && move(p, a_hyp) == t) return p;
    }
    return t;
  };

  auto rng = make_rng(8);
  VectorDynamicsModel fwd = VectorDynamicsModel::per_action_linear(actions, states, rng);
  VectorDynamicsModel bwd = VectorDynamicsModel::per_action_linear(actions, states, rng);
  for (int a = 0; a < actions; ++a) {
    fwd.linear_models()[a].weight.setZero();
    fwd.linear_models()[a].bias.setZero();
    bwd.linear_models()[a].weight.setZero();
    bwd.linear_models()[a].bias.setZero();
    for (int s = 0; s < states; ++s) {
      fwd.linear_models()[a].weight(move(s, a), s) = 1.0;
      if (a == a_hyp) bwd.linear_models()[a].weight(backward(s), s) = 1.0;
    }
  }

  AgentConfig cfg;
  cfg.alpha = 0.001;
  cfg.gamma = 0.8;
  auto rng2 = make_rng(9);
  EeaDqnAgent agent(states, actions, a_hyp, {}, Activation::Identity, cfg, rng2);
  // Single linear head realizing a value table over states.
  Eigen::VectorXd table = Eigen::VectorXd::Random(states);
  agent.online_net().params().head(states) = table;
  agent.online_net().params()(states) = 0.0;  // bias
  agent.sync_target();
  agent.set_models(fwd, bwd);

  auto one_hot = [&](int s) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(states);
    v(s) = 1.0;
    return v;
  };

  std::vector<Transition> batch;
  std::mt19937_64 pick_rng(11);
  std::uniform_int_distribution<int> pick_state(0, states - 1);
  std::uniform_int_distribution<int> pick_action(0, actions - 1);
  for (int i = 0; i < 12; ++i) {
    const int s = pick_state(pick_rng);
    const int a = pick_action(pick_rng);
    Transition t;
    t.obs = agent.map_obs(one_hot(s), a);
    t.action = a_hyp;
    t.reward = (i % 4 == 0) ? 1.0 : 0.0;
    t.next_obs = one_hot(move(s, a));
    t.done = (i % 5 == 0);
    batch.push_back(std::move(t));
  }

  const Eigen::VectorXd got = agent.td_targets(batch);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    double bootstrap = 0.0;
    if (!batch[i].done) {
      // Vanilla target on the mapped pairs: max over actions of the table
      // read at the hypothetical state of the next observation.
      int next = -1;
      batch[i].next_obs.maxCoeff(&next);
      double best = -1e100;
      for (int a2 = 0; a2 < actions; ++a2) {
        const int image = a2 == a_hyp ? next : backward(move(next, a2));
        best = std::max(best, table(image));
      }
      bootstrap = best;
    }
    CHECK(got(i) == batch[i].reward + cfg.gamma * bootstrap);
  }
}

TEST_CASE("eea-dqn: stored transitions are mapped onto the hypothetical pair") {
  auto rng = make_rng(13);
  AgentConfig cfg;
  cfg.alpha = 0.001;
  VectorDynamicsModel fwd = VectorDynamicsModel::per_action_linear(2, 4, rng);
  VectorDynamicsModel bwd = VectorDynamicsModel::per_action_linear(2, 4, rng);
  EeaDqnAgent agent(4, 2, 0, {8}, Activation::Tanh, cfg, rng);
  agent.set_models(fwd, bwd);

  Eigen::VectorXd obs = Eigen::VectorXd::Random(4);
  Eigen::VectorXd next = Eigen::VectorXd::Random(4);
  CHECK(agent.map_obs(obs, 0) == obs);  // identity branch
  const Eigen::VectorXd mapped = agent.map_obs(obs, 1);
  CHECK(mapped != obs);
  agent.observe(obs, 1, 0.5, next, false);
  CHECK(agent.replay_size() == 1);
}

}  // TEST_SUITE
