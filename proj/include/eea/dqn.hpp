#pragma once

#include <random>
#include <vector>

#include "eea/dense_net.hpp"
#include "eea/dynamics.hpp"
#include "eea/optimizer.hpp"
#include "eea/replay.hpp"
#include "eea/tabular_agents.hpp"

namespace eea {

/// Value-based agent with experience replay, a periodically synchronized
/// target network, and epsilon-greedy acting. Regression targets are
/// r + gamma * (1 - done) * max_a' Q_target(s', a'); the training loss is
/// 0.5 * mean squared error on the taken action's head.
class DqnAgent {
 public:
  DqnAgent(int obs_size, int action_count, const std::vector<int>& hidden_sizes,
           Activation activation, AgentConfig config, std::mt19937_64& rng);

  int action_count() const { return action_count_; }
  Eigen::VectorXd q_values(const Eigen::VectorXd& obs) const;
  int greedy(const Eigen::VectorXd& obs) const;
  int act(const Eigen::VectorXd& obs, std::mt19937_64& rng);

  /// Stores the transition and advances the target-sync step counter.
  void observe(Transition transition);
  /// One batch update when the replay holds at least a batch; returns the
  /// loss (0 when skipped).
  double train_step(std::mt19937_64& rng);
  double train_on_batch(const std::vector<Transition>& batch);
  /// Regression targets for a batch, computed with the target network.
  Eigen::VectorXd td_targets(const std::vector<Transition>& batch) const;

  void sync_target() { target_ = online_; }
  void scale_learning_rate(double factor) { opt_.step_size *= factor; }
  long replay_size() const { return replay_.size(); }
  const DenseNet& online_net() const { return online_; }
  DenseNet& online_net() { return online_; }
  const DenseNet& target_net() const { return target_; }
  const AgentConfig& config() const { return config_; }

 private:
  int action_count_;
  AgentConfig config_;
  DenseNet online_, target_;
  OptimizerState opt_;
  ReplayBuffer replay_;
  long act_steps_ = 0;
  long env_steps_ = 0;
};

/// DQN variant whose Q-network has a single head for the hypothetical
/// action. Acting and TD targets evaluate every action through the
/// forwards-backwards map; stored transitions are mapped to
/// (s_hyp, a_hyp) before regression.
class EeaDqnAgent {
 public:
  EeaDqnAgent(int obs_size, int action_count, int a_hyp, const std::vector<int>& hidden_sizes,
              Activation activation, AgentConfig config, std::mt19937_64& rng);

  void set_models(VectorDynamicsModel forward, VectorDynamicsModel backward);
  bool models_ready() const { return models_ready_; }
  int hypothetical_action() const { return a_hyp_; }

  /// Hypothetical observation for (obs, action); identity when
  /// action = a_hyp.
  Eigen::VectorXd map_obs(const Eigen::VectorXd& obs, int action) const;
  /// Algorithm-1 value vector over all actions via the online network.
  Eigen::VectorXd q_values(const Eigen::VectorXd& obs) const;
  int greedy(const Eigen::VectorXd& obs) const;
  int act(const Eigen::VectorXd& obs, std::mt19937_64& rng);

  /// Maps the transition and stores it; advances the target-sync counter.
  void observe(const Eigen::VectorXd& obs, int action, double reward,
               const Eigen::VectorXd& next_obs, bool done);
  double train_step(std::mt19937_64& rng);
  /// Batch entries carry mapped observations; `next_obs` stays raw.
  double train_on_batch(const std::vector<Transition>& batch);
  Eigen::VectorXd td_targets(const std::vector<Transition>& batch) const;

  void sync_target() { target_ = online_; }
  void scale_learning_rate(double factor) { opt_.step_size *= factor; }
  long replay_size() const { return replay_.size(); }
  const DenseNet& online_net() const { return online_; }
  DenseNet& online_net() { return online_; }
  const AgentConfig& config() const { return config_; }

 private:
  // Columns: one mapped observation per action, Algorithm-1 order.
  Eigen::MatrixXd mapped_columns(const Eigen::VectorXd& obs) const;

  int obs_size_;
  int action_count_;
  int a_hyp_;
  AgentConfig config_;
  DenseNet online_, target_;
  OptimizerState opt_;
  ReplayBuffer replay_;
  VectorDynamicsModel forward_, backward_;
  bool models_ready_ = false;
  long act_steps_ = 0;
  long env_steps_ = 0;
};

}  // namespace eea
