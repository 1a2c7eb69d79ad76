#include "eea/dqn.hpp"

#include <stdexcept>

namespace eea {

namespace {

std::vector<int> full_sizes(int obs_size, const std::vector<int>& hidden, int heads) {
  std::vector<int> sizes;
  sizes.push_back(obs_size);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(heads);
  return sizes;
}

int argmax_lowest(const Eigen::VectorXd& values) {
  int best = 0;
  for (int i = 1; i < values.size(); ++i) {
    if (values(i) > values(best)) best = i;
  }
  return best;
}

}  // namespace

DqnAgent::DqnAgent(int obs_size, int action_count, const std::vector<int>& hidden_sizes,
                   Activation activation, AgentConfig config, std::mt19937_64& rng)
    : action_count_(action_count),
      config_(config),
      online_(DenseNet::mlp(full_sizes(obs_size, hidden_sizes, action_count), activation)),
      opt_(OptimizerState::make(config.optimizer, config.alpha)),
      replay_(config.replay_capacity) {
  config_.validate();
  online_.init_uniform(rng);
  target_ = online_;
}

Eigen::VectorXd DqnAgent::q_values(const Eigen::VectorXd& obs) const {
  return online_.forward(obs);
}

int DqnAgent::greedy(const Eigen::VectorXd& obs) const { return argmax_lowest(q_values(obs)); }

int DqnAgent::act(const Eigen::VectorXd& obs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const double epsilon = config_.epsilon_at(act_steps_++);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, action_count_ - 1);
    return pick(rng);
  }
  return greedy(obs);
}

void DqnAgent::observe(Transition transition) {
  replay_.push(std::move(transition));
  ++env_steps_;
  if (config_.target_sync_period > 0 && env_steps_ % config_.target_sync_period == 0) {
    sync_target();
  }
}

Eigen::VectorXd DqnAgent::td_targets(const std::vector<Transition>& batch) const {
  const long n = static_cast<long>(batch.size());
  Eigen::MatrixXd next(batch[0].next_obs.size(), n);
  for (long i = 0; i < n; ++i) next.col(i) = batch[i].next_obs;
  const Eigen::MatrixXd q_next = target_.forward_batch(next);

  Eigen::VectorXd targets(n);
  for (long i = 0; i < n; ++i) {
    const double bootstrap = batch[i].done ? 0.0 : q_next.col(i).maxCoeff();
    targets(i) = batch[i].reward + config_.gamma * bootstrap;
  }
  return targets;
}

double DqnAgent::train_on_batch(const std::vector<Transition>& batch) {
  if (batch.empty()) throw std::invalid_argument("DqnAgent::train_on_batch: empty batch");
  const long n = static_cast<long>(batch.size());
  Eigen::MatrixXd inputs(batch[0].obs.size(), n);
  for (long i = 0; i < n; ++i) inputs.col(i) = batch[i].obs;

  const Eigen::VectorXd targets = td_targets(batch);
  // Regress only the taken action's head: other heads keep zero residual.
  Eigen::MatrixXd target_matrix = online_.forward_batch(inputs);
  for (long i = 0; i < n; ++i) target_matrix(batch[i].action, i) = targets(i);

  Eigen::VectorXd grad;
  const double loss = online_.gradient(inputs, target_matrix, grad);
  apply_update(opt_, online_.params(), grad);
  return loss;
}

double DqnAgent::train_step(std::mt19937_64& rng) {
  if (replay_.size() < config_.batch_size) return 0.0;
  return train_on_batch(replay_.sample(config_.batch_size, rng));
}

EeaDqnAgent::EeaDqnAgent(int obs_size, int action_count, int a_hyp,
                         const std::vector<int>& hidden_sizes, Activation activation,
                         AgentConfig config, std::mt19937_64& rng)
    : obs_size_(obs_size),
      action_count_(action_count),
      a_hyp_(a_hyp),
      config_(config),
      online_(DenseNet::mlp(full_sizes(obs_size, hidden_sizes, 1), activation)),
      opt_(OptimizerState::make(config.optimizer, config.alpha)),
      replay_(config.replay_capacity) {
  config_.validate();
  if (a_hyp < 0 || a_hyp >= action_count) {
    throw std::invalid_argument("EeaDqnAgent: hypothetical action out of range");
  }
  online_.init_uniform(rng);
  target_ = online_;
}

void EeaDqnAgent::set_models(VectorDynamicsModel forward, VectorDynamicsModel backward) {
  forward_ = std::move(forward);
  backward_ = std::move(backward);
  models_ready_ = true;
}

Eigen::VectorXd EeaDqnAgent::map_obs(const Eigen::VectorXd& obs, int action) const {
  if (!models_ready_) throw std::logic_error("EeaDqnAgent: models not trained yet");
  return hypothetical_state(forward_, backward_, obs, action, a_hyp_);
}

Eigen::MatrixXd EeaDqnAgent::mapped_columns(const Eigen::VectorXd& obs) const {
  Eigen::MatrixXd columns(obs_size_, action_count_);
  for (int a = 0; a < action_count_; ++a) columns.col(a) = map_obs(obs, a);
  return columns;
}

Eigen::VectorXd EeaDqnAgent::q_values(const Eigen::VectorXd& obs) const {
  return online_.forward_batch(mapped_columns(obs)).transpose();
}

int EeaDqnAgent::greedy(const Eigen::VectorXd& obs) const { return argmax_lowest(q_values(obs)); }

int EeaDqnAgent::act(const Eigen::VectorXd& obs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const double epsilon = config_.epsilon_at(act_steps_++);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, action_count_ - 1);
    return pick(rng);
  }
  return greedy(obs);
}

void EeaDqnAgent::observe(const Eigen::VectorXd& obs, int action, double reward,
                          const Eigen::VectorXd& next_obs, bool done) {
  Transition t;
  t.obs = map_obs(obs, action);
  t.action = a_hyp_;
  t.reward = reward;
  t.next_obs = next_obs;
  t.done = done;
  replay_.push(std::move(t));
  ++env_steps_;
  if (config_.target_sync_period > 0 && env_steps_ % config_.target_sync_period == 0) {
    sync_target();
  }
}

Eigen::VectorXd EeaDqnAgent::td_targets(const std::vector<Transition>& batch) const {
  const long n = static_cast<long>(batch.size());
  // One stacked forward pass over all (sample, action) hypothetical states.
  Eigen::MatrixXd columns(obs_size_, n * action_count_);
  for (long i = 0; i < n; ++i) {
    columns.middleCols(i * action_count_, action_count_) = mapped_columns(batch[i].next_obs);
  }
  const Eigen::MatrixXd q_next = target_.forward_batch(columns);

  Eigen::VectorXd targets(n);
  for (long i = 0; i < n; ++i) {
    const double bootstrap =
        batch[i].done ? 0.0
                      : q_next.middleCols(i * action_count_, action_count_).maxCoeff();
    targets(i) = batch[i].reward + config_.gamma * bootstrap;
  }
  return targets;
}

double EeaDqnAgent::train_on_batch(const std::vector<Transition>& batch) {
  if (batch.empty()) throw std::invalid_argument("EeaDqnAgent::train_on_batch: empty batch");
  const long n = static_cast<long>(batch.size());
  Eigen::MatrixXd inputs(obs_size_, n);
  for (long i = 0; i < n; ++i) inputs.col(i) = batch[i].obs;

  Eigen::MatrixXd target_matrix(1, n);
  target_matrix.row(0) = td_targets(batch).transpose();

  Eigen::VectorXd grad;
  const double loss = online_.gradient(inputs, target_matrix, grad);
  apply_update(opt_, online_.params(), grad);
  return loss;
}

double EeaDqnAgent::train_step(std::mt19937_64& rng) {
  if (replay_.size() < config_.batch_size) return 0.0;
  return train_on_batch(replay_.sample(config_.batch_size, rng));
}

}  // namespace eea
