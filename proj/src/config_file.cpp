#include "eea/config_file.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "eea/csv.hpp"

namespace eea {

namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

}  // namespace

ConfigMap parse_config_stream(std::istream& in) {
  ConfigMap map;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key or value");
    }
    map[key] = value;
  }
  return map;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config_stream(in);
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "experiment",       "agent",          "seeds",
      "episodes",         "planning_backups", "planning_eval_every",
      "hyp_action",       "step_cap",       "alpha",
      "gamma",            "epsilon",        "epsilon_end",
      "epsilon_decay_tau", "optimizer",     "target_sync",
      "replay_capacity",  "batch_size",     "updates_per_step",
      "lr_decay_episode", "hidden_width",   "activation",
      "model_episodes",   "pretrain_steps", "model_epochs",
      "model_lr",         "model_dir",      "out",
      "master_seed",      "parallelism"};
  return keys;
}

ExperimentConfig config_from_map(const ConfigMap& map) {
  for (const auto& [key, value] : map) {
    const auto& keys = known_config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }

  ExperimentConfig config;
  if (auto it = map.find("experiment"); it != map.end()) {
    config.experiment = experiment_from_string(it->second);
  }
  if (auto it = map.find("agent"); it != map.end()) {
    config.agent = agent_from_string(it->second);
  }
  config = resolve_defaults(config);

  auto get_int = [&](const std::string& key, auto setter) {
    if (auto it = map.find(key); it != map.end()) setter(std::stol(it->second));
  };
  auto get_double = [&](const std::string& key, auto setter) {
    if (auto it = map.find(key); it != map.end()) setter(std::stod(it->second));
  };

  get_int("seeds", [&](long v) { config.seeds = static_cast<int>(v); });
  get_int("episodes", [&](long v) { config.episodes = static_cast<int>(v); });
  get_int("planning_backups", [&](long v) { config.planning_backups = v; });
  get_int("planning_eval_every", [&](long v) { config.planning_eval_every = static_cast<int>(v); });
  get_int("hyp_action", [&](long v) { config.hyp_action = static_cast<int>(v); });
  get_int("step_cap", [&](long v) { config.step_cap = static_cast<int>(v); });
  get_double("alpha", [&](double v) { config.agent_config.alpha = v; });
  get_double("gamma", [&](double v) { config.agent_config.gamma = v; });
  get_double("epsilon", [&](double v) { config.agent_config.epsilon = v; });
  get_double("epsilon_end", [&](double v) { config.agent_config.epsilon_end = v; });
  get_double("epsilon_decay_tau", [&](double v) { config.agent_config.epsilon_decay_tau = v; });
  if (auto it = map.find("optimizer"); it != map.end()) {
    config.agent_config.optimizer = optimizer_from_string(it->second);
  }
  get_int("target_sync", [&](long v) { config.agent_config.target_sync_period = static_cast<int>(v); });
  get_int("replay_capacity", [&](long v) { config.agent_config.replay_capacity = v; });
  get_int("batch_size", [&](long v) { config.agent_config.batch_size = static_cast<int>(v); });
  get_int("updates_per_step", [&](long v) { config.agent_config.updates_per_step = static_cast<int>(v); });
  get_int("lr_decay_episode", [&](long v) { config.agent_config.lr_decay_episode = static_cast<int>(v); });
  get_int("hidden_width", [&](long v) { config.agent_config.hidden_width = static_cast<int>(v); });
  if (auto it = map.find("activation"); it != map.end()) {
    config.agent_config.activation = activation_from_string(it->second);
  }
  get_int("model_episodes", [&](long v) { config.model_episodes = static_cast<int>(v); });
  get_int("pretrain_steps", [&](long v) { config.pretrain_steps = v; });
  get_int("model_epochs", [&](long v) { config.model_epochs = static_cast<int>(v); });
  get_double("model_lr", [&](double v) { config.model_lr = v; });
  if (auto it = map.find("model_dir"); it != map.end()) config.model_dir = it->second;
  if (auto it = map.find("out"); it != map.end()) config.out_path = it->second;
  get_int("master_seed", [&](long v) { config.master_seed = static_cast<std::uint64_t>(v); });
  get_int("parallelism", [&](long v) { config.parallelism = static_cast<int>(v); });

  config.validate();
  return config;
}

std::string render_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "experiment = " << to_string(config.experiment) << "\n";
  out << "agent = " << to_string(config.agent) << "\n";
  out << "seeds = " << config.seeds << "\n";
  out << "episodes = " << config.episodes << "\n";
  out << "planning_backups = " << config.planning_backups << "\n";
  out << "planning_eval_every = " << config.planning_eval_every << "\n";
  out << "hyp_action = " << config.hyp_action << "\n";
  out << "step_cap = " << config.step_cap << "\n";
  out << "alpha = " << format_double(config.agent_config.alpha) << "\n";
  out << "gamma = " << format_double(config.agent_config.gamma) << "\n";
  out << "epsilon = " << format_double(config.agent_config.epsilon) << "\n";
  out << "epsilon_end = " << format_double(config.agent_config.epsilon_end) << "\n";
  out << "epsilon_decay_tau = " << format_double(config.agent_config.epsilon_decay_tau) << "\n";
  out << "optimizer = " << to_string(config.agent_config.optimizer) << "\n";
  out << "target_sync = " << config.agent_config.target_sync_period << "\n";
  out << "replay_capacity = " << config.agent_config.replay_capacity << "\n";
  out << "batch_size = " << config.agent_config.batch_size << "\n";
  out << "updates_per_step = " << config.agent_config.updates_per_step << "\n";
  out << "lr_decay_episode = " << config.agent_config.lr_decay_episode << "\n";
  out << "hidden_width = " << config.agent_config.hidden_width << "\n";
  out << "activation = " << to_string(config.agent_config.activation) << "\n";
  out << "model_episodes = " << config.model_episodes << "\n";
  out << "pretrain_steps = " << config.pretrain_steps << "\n";
  out << "model_epochs = " << config.model_epochs << "\n";
  out << "model_lr = " << format_double(config.model_lr) << "\n";
  out << "model_dir = " << config.model_dir << "\n";
  out << "out = " << config.out_path << "\n";
  out << "master_seed = " << config.master_seed << "\n";
  out << "parallelism = " << config.parallelism << "\n";
  return out.str();
}

}  // namespace eea
