#include "eea/tabular_agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eea {

void AgentConfig::validate() const {
  if (alpha <= 0.0) throw std::invalid_argument("AgentConfig: alpha must be > 0");
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("AgentConfig: gamma outside [0, 1]");
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw std::invalid_argument("AgentConfig: epsilon outside [0, 1]");
  }
  if (batch_size <= 0 || replay_capacity <= 0 || updates_per_step < 0) {
    throw std::invalid_argument("AgentConfig: invalid replay/batch settings");
  }
}

double AgentConfig::epsilon_at(long steps) const {
  if (epsilon_decay_tau <= 0.0) return epsilon;
  const double floor = epsilon_end < 0.0 ? 0.0 : epsilon_end;
  return floor + (epsilon - floor) * std::exp(-static_cast<double>(steps) / epsilon_decay_tau);
}

namespace {

int argmax_lowest(const std::vector<double>& values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

// Exploration breaks exact value ties uniformly at random; a lowest-index
// rule would pin a zero-initialized agent to action 0 for whole episodes.
// Greedy evaluation (greedy_action) stays deterministic.
template <typename QValuesFn>
int epsilon_greedy(int action_count, double epsilon, const QValuesFn& q_values,
                   std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, action_count - 1);
    return pick(rng);
  }
  const auto values = q_values();
  const double best = *std::max_element(values.begin(), values.end());
  std::vector<int> maximizers;
  for (int a = 0; a < action_count; ++a) {
    if (values[a] == best) maximizers.push_back(a);
  }
  if (maximizers.size() == 1) return maximizers.front();
  std::uniform_int_distribution<std::size_t> pick(0, maximizers.size() - 1);
  return maximizers[pick(rng)];
}

}  // namespace

QLearningAgent::QLearningAgent(int state_count, int action_count, AgentConfig config)
    : config_(config), table_(state_count, action_count) {
  config_.validate();
}

std::vector<double> QLearningAgent::q_values(int state) const {
  std::vector<double> values(table_.action_count());
  for (int a = 0; a < table_.action_count(); ++a) values[a] = table_.values(state, a);
  return values;
}

int QLearningAgent::greedy_action(int state) const { return argmax_lowest(q_values(state)); }

int QLearningAgent::select_action(int state, std::mt19937_64& rng) {
  return epsilon_greedy(table_.action_count(), config_.epsilon_at(steps_++),
                        [&] { return q_values(state); }, rng);
}

void QLearningAgent::update(int state, int action, double reward, int next_state, bool done) {
  double bootstrap = 0.0;
  if (!done) {
    const auto next_values = q_values(next_state);
    bootstrap = *std::max_element(next_values.begin(), next_values.end());
  }
  const double target = reward + config_.gamma * bootstrap;
  table_.values(state, action) += config_.alpha * (target - table_.values(state, action));
  table_.visits(state, action) += 1;
  table_.check_finite();
}

std::vector<double> eea_q_values(int state, int action_count,
                                 const std::function<double(int)>& hyp_read,
                                 const std::function<double(int, int)>& fallback_read,
                                 const ExactForwardFn& fwd, const ExactBackwardFn& bwd,
                                 int a_hyp) {
  std::vector<double> values(action_count);
  for (int a = 0; a < action_count; ++a) {
    if (a == a_hyp) {
      values[a] = hyp_read(state);
      continue;
    }
    std::optional<int> image = hypothetical_state(fwd, bwd, state, a, a_hyp);
    values[a] = image ? hyp_read(*image) : fallback_read(state, a);
  }
  return values;
}

EeaQLearningAgent::EeaQLearningAgent(int state_count, int action_count, int a_hyp,
                                     ExactForwardFn fwd, ExactBackwardFn bwd, AgentConfig config,
                                     bool bootstrap_includes_fallback)
    : state_count_(state_count),
      action_count_(action_count),
      a_hyp_(a_hyp),
      fwd_(std::move(fwd)),
      bwd_(std::move(bwd)),
      config_(config),
      bootstrap_includes_fallback_(bootstrap_includes_fallback),
      hyp_values_(state_count, 0.0) {
  config_.validate();
  if (a_hyp < 0 || a_hyp >= action_count) {
    throw std::invalid_argument("EeaQLearningAgent: hypothetical action out of range");
  }
}

std::vector<double> EeaQLearningAgent::q_values(int state) const {
  return eea_q_values(
      state, action_count_, [this](int s) { return hyp_values_[s]; },
      [this](int s, int a) {
        auto it = fallback_.find({s, a});
        return it == fallback_.end() ? 0.0 : it->second;
      },
      fwd_, bwd_, a_hyp_);
}

int EeaQLearningAgent::greedy_action(int state) const { return argmax_lowest(q_values(state)); }

int EeaQLearningAgent::select_action(int state, std::mt19937_64& rng) {
  return epsilon_greedy(action_count_, config_.epsilon_at(steps_++),
                        [&] { return q_values(state); }, rng);
}

double EeaQLearningAgent::max_bootstrap(int state) const {
  if (bootstrap_includes_fallback_) {
    auto values = q_values(state);
    return *std::max_element(values.begin(), values.end());
  }
  // Reduced-table-only bootstrap: max over the hypothetical slots reachable
  // from `state`, skipping pairs that would go through the fallback table.
  double best = hyp_values_[state];
  for (int a = 0; a < action_count_; ++a) {
    if (a == a_hyp_) continue;
    std::optional<int> image = hypothetical_state(fwd_, bwd_, state, a, a_hyp_);
    if (image) best = std::max(best, hyp_values_[*image]);
  }
  return best;
}

void EeaQLearningAgent::update(int state, int action, double reward, int next_state, bool done) {
  const double target = reward + (done ? 0.0 : config_.gamma * max_bootstrap(next_state));
  std::optional<int> image = hypothetical_state(fwd_, bwd_, state, action, a_hyp_);
  if (image) {
    double& slot = hyp_values_[*image];
    slot += config_.alpha * (target - slot);
    hyp_written_.insert(*image);
  } else {
    double& slot = fallback_[{state, action}];
    slot += config_.alpha * (target - slot);
  }
}

std::vector<std::pair<int, int>> non_terminal_pairs(const TabularMDP& mdp) {
  std::vector<std::pair<int, int>> pairs;
  for (int s = 0; s < mdp.state_count; ++s) {
    if (mdp.is_terminal(s)) continue;
    for (int a = 0; a < mdp.action_count; ++a) pairs.emplace_back(s, a);
  }
  return pairs;
}

}  // namespace eea
