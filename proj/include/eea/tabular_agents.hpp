#pragma once

#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "eea/dynamics.hpp"
#include "eea/mdp.hpp"
#include "eea/optimizer.hpp"

namespace eea {

/// Hyperparameters shared by the tabular and network agents. Fields that a
/// given agent does not use are ignored.
struct AgentConfig {
  double alpha = 0.1;
  double gamma = 0.95;
  double epsilon = 0.1;
  double epsilon_end = -1.0;      // < 0: constant epsilon
  double epsilon_decay_tau = 0.0; // steps; 0: no decay
  OptimizerKind optimizer = OptimizerKind::Adam;
  int target_sync_period = 100;   // environment steps between target syncs
  long replay_capacity = 10000;
  int batch_size = 64;
  int updates_per_step = 1;
  int lr_decay_episode = 0;       // divide step size by 10 at this episode; 0: never
  int hidden_width = 128;
  Activation activation = Activation::Tanh;

  void validate() const;
  /// Exploration rate after `steps` environment steps.
  double epsilon_at(long steps) const;
};

/// Classic tabular Q-learning over a dense table.
class QLearningAgent {
 public:
  QLearningAgent(int state_count, int action_count, AgentConfig config);

  int select_action(int state, std::mt19937_64& rng);
  int greedy_action(int state) const;
  void update(int state, int action, double reward, int next_state, bool done);

  std::vector<double> q_values(int state) const;
  const QTable& table() const { return table_; }

 private:
  AgentConfig config_;
  QTable table_;
  long steps_ = 0;
};

/// Algorithm-1 value prediction over a free-standing Q read function: the
/// hypothetical-action entry is a direct read at s; every other action reads
/// at the hypothetical state, falling back to `fallback_read` when the
/// backward image is absent.
std::vector<double> eea_q_values(int state, int action_count,
                                 const std::function<double(int)>& hyp_read,
                                 const std::function<double(int, int)>& fallback_read,
                                 const ExactForwardFn& fwd, const ExactBackwardFn& bwd,
                                 int a_hyp);

/// Tabular Q-learning through the equivalent-effect map: values are stored
/// per state for the hypothetical action only, plus a fallback slot for each
/// pair whose hypothetical state does not exist.
class EeaQLearningAgent {
 public:
  EeaQLearningAgent(int state_count, int action_count, int a_hyp, ExactForwardFn fwd,
                    ExactBackwardFn bwd, AgentConfig config,
                    bool bootstrap_includes_fallback = true);

  std::vector<double> q_values(int state) const;
  int select_action(int state, std::mt19937_64& rng);
  int greedy_action(int state) const;
  void update(int state, int action, double reward, int next_state, bool done);

  int hypothetical_action() const { return a_hyp_; }
  /// Distinct storage slots written so far (hypothetical + fallback).
  long slots_written() const {
    return static_cast<long>(hyp_written_.size() + fallback_.size());
  }

 private:
  double max_bootstrap(int state) const;

  int state_count_;
  int action_count_;
  int a_hyp_;
  ExactForwardFn fwd_;
  ExactBackwardFn bwd_;
  AgentConfig config_;
  bool bootstrap_includes_fallback_;
  std::vector<double> hyp_values_;                 // one slot per state, action a_hyp
  std::map<std::pair<int, int>, double> fallback_; // border pairs
  std::set<int> hyp_written_;
  long steps_ = 0;
};

/// One random-sample one-step tabular Q-planning backup: draws (s, a)
/// uniformly from the non-terminal pairs, simulates it with the exact MDP,
/// and applies the agent's Q-learning update.
template <typename Agent>
void q_planning_step(Agent& agent, const TabularMDP& mdp,
                     const std::vector<std::pair<int, int>>& pairs, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
  auto [s, a] = pairs[pick(rng)];
  const int next = mdp.successor(s, a);
  agent.update(s, a, mdp.reward_for(s, a, next), next, mdp.is_terminal(next));
}

/// All (s, a) with s non-terminal, in index order.
std::vector<std::pair<int, int>> non_terminal_pairs(const TabularMDP& mdp);

/// Runs one epsilon-greedy episode and applies the agent's update per step.
/// Returns (episode length, undiscounted return). The episode is cut at
/// `step_cap` without terminal bootstrapping.
template <typename Agent>
std::pair<long, double> q_learning_episode(Agent& agent, const TabularMDP& mdp, int start,
                                           int step_cap, std::mt19937_64& rng) {
  int state = start;
  long steps = 0;
  double ret = 0.0;
  while (steps < step_cap && !mdp.is_terminal(state)) {
    const int action = agent.select_action(state, rng);
    const int next = mdp.successor(state, action);
    const double reward = mdp.reward_for(state, action, next);
    agent.update(state, action, reward, next, mdp.is_terminal(next));
    ret += reward;
    state = next;
    ++steps;
  }
  return {steps, ret};
}

}  // namespace eea
