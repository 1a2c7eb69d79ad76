#include "eea/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "eea/cartpole.hpp"
#include "eea/dqn.hpp"
#include "eea/dynamics.hpp"
#include "eea/maze.hpp"
#include "eea/predator_prey.hpp"
#include "eea/rng.hpp"

namespace eea {

ExperimentKind experiment_from_string(const std::string& name) {
  if (name == "maze-q") return ExperimentKind::MazeQ;
  if (name == "maze-plan") return ExperimentKind::MazePlan;
  if (name == "cartpole") return ExperimentKind::Cartpole;
  if (name == "predprey") return ExperimentKind::PredPrey;
  throw std::invalid_argument("unknown experiment: " + name);
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::MazeQ: return "maze-q";
    case ExperimentKind::MazePlan: return "maze-plan";
    case ExperimentKind::Cartpole: return "cartpole";
    case ExperimentKind::PredPrey: return "predprey";
  }
  return "maze-q";
}

AgentKind agent_from_string(const std::string& name) {
  if (name == "baseline") return AgentKind::Baseline;
  if (name == "eea") return AgentKind::Eea;
  throw std::invalid_argument("unknown agent: " + name);
}

std::string to_string(AgentKind kind) {
  return kind == AgentKind::Baseline ? "baseline" : "eea";
}

void ExperimentConfig::validate() const {
  if (seeds < 1) throw std::invalid_argument("ExperimentConfig: seeds must be >= 1");
  if (episodes < 1 && experiment != ExperimentKind::MazePlan) {
    throw std::invalid_argument("ExperimentConfig: episodes must be >= 1");
  }
  if (experiment == ExperimentKind::MazePlan && planning_backups < 1) {
    throw std::invalid_argument("ExperimentConfig: planning_backups must be >= 1");
  }
  agent_config.validate();
}

std::string ExperimentConfig::default_out_path() const {
  return "./results/" + to_string(experiment) + "-" + to_string(agent) + ".csv";
}

ExperimentConfig resolve_defaults(ExperimentConfig config) {
  auto& agent = config.agent_config;
  switch (config.experiment) {
    case ExperimentKind::MazeQ:
    case ExperimentKind::MazePlan:
      if (config.episodes < 0) config.episodes = 50;
      if (config.planning_backups < 0) config.planning_backups = 6000;
      if (config.hyp_action < 0) config.hyp_action = maze_action::kLeft;
      if (config.step_cap < 0) config.step_cap = 2000;
      break;
    case ExperimentKind::Cartpole:
      if (config.episodes < 0) config.episodes = 40;
      if (config.hyp_action < 0) config.hyp_action = cartpole_action::kLeft;
      if (config.step_cap < 0) config.step_cap = CartpoleEnv::kDefaultStepCap;
      agent.alpha = 0.001;
      agent.gamma = 0.8;
      agent.epsilon = 0.1;
      agent.activation = Activation::Tanh;
      agent.optimizer = OptimizerKind::Adam;
      agent.lr_decay_episode = config.agent == AgentKind::Eea ? 10 : 15;
      if (config.model_epochs < 0) config.model_epochs = 400;
      if (config.model_lr < 0) config.model_lr = 0.01;
      break;
    case ExperimentKind::PredPrey:
      if (config.episodes < 0) config.episodes = 30;
      if (config.hyp_action < 0) config.hyp_action = predprey_action::kStay;
      if (config.step_cap < 0) config.step_cap = PredPreyEnv::kDefaultStepCap;
      agent.gamma = config.agent == AgentKind::Eea ? 0.8 : 0.99;
      agent.alpha = config.agent == AgentKind::Eea ? 0.01 : 0.001;
      agent.epsilon = 0.1;
      agent.activation = Activation::Relu;
      agent.optimizer = OptimizerKind::Adam;
      if (config.model_epochs < 0) config.model_epochs = 30;
      if (config.model_lr < 0) config.model_lr = 0.001;
      break;
  }
  if (config.episodes < 0) config.episodes = 50;
  if (config.model_epochs < 0) config.model_epochs = 30;
  if (config.model_lr < 0) config.model_lr = 0.001;
  if (config.out_path.empty()) config.out_path = config.default_out_path();
  return config;
}

namespace {

template <typename Agent>
long greedy_rollout(const Agent& agent, const TabularMDP& mdp, int start, int cap) {
  int state = start;
  long steps = 0;
  while (steps < cap && !mdp.is_terminal(state)) {
    state = mdp.successor(state, agent.greedy_action(state));
    ++steps;
  }
  return mdp.is_terminal(state) ? steps : cap + 1;
}

RunRecord make_record(const ExperimentConfig& cfg, int seed, int episode, long steps,
                      double ret) {
  RunRecord rec;
  rec.experiment = to_string(cfg.experiment);
  rec.agent = to_string(cfg.agent);
  rec.seed = seed;
  rec.episode = episode;
  rec.steps = steps;
  rec.ret = ret;
  rec.wall_ms = 0;
  return rec;
}

template <typename Agent>
std::vector<RunRecord> maze_q_episodes(const ExperimentConfig& cfg, Agent& agent, int seed,
                                       std::mt19937_64& rng) {
  MazeEnv env;
  std::vector<RunRecord> records;
  for (int ep = 1; ep <= cfg.episodes; ++ep) {
    Observation obs = env.reset(0);
    long steps = 0;
    double ret = 0.0;
    bool done = false;
    while (!done && steps < cfg.step_cap) {
      const int state = obs.index;
      const int action = agent.select_action(state, rng);
      StepResult result = env.step(action);
      agent.update(state, action, result.reward, result.obs.index, result.done);
      ret += result.reward;
      obs = result.obs;
      done = result.done;
      ++steps;
    }
    records.push_back(make_record(cfg, seed, ep, steps, ret));
  }
  return records;
}

std::vector<RunRecord> run_maze_q_seed(const ExperimentConfig& cfg, const TabularMDP& mdp,
                                       int seed) {
  const std::uint64_t run_seed = derive_seed(cfg.master_seed, seed);
  auto rng = make_rng(derive_seed(run_seed, 2));
  if (cfg.agent == AgentKind::Baseline) {
    QLearningAgent agent(mdp.state_count, mdp.action_count, cfg.agent_config);
    return maze_q_episodes(cfg, agent, seed, rng);
  }
  EeaQLearningAgent agent(mdp.state_count, mdp.action_count, cfg.hyp_action,
                          make_exact_forward(mdp), make_exact_backward(mdp), cfg.agent_config);
  return maze_q_episodes(cfg, agent, seed, rng);
}

template <typename Agent>
std::vector<RunRecord> maze_plan_checkpoints(const ExperimentConfig& cfg, const TabularMDP& mdp,
                                             Agent& agent, int seed, std::mt19937_64& rng) {
  const auto pairs = non_terminal_pairs(mdp);
  std::vector<RunRecord> records;
  int checkpoint = 0;
  constexpr int kEvalCap = 200;
  for (long backup = 1; backup <= cfg.planning_backups; ++backup) {
    q_planning_step(agent, mdp, pairs, rng);
    if (backup % cfg.planning_eval_every == 0) {
      const long steps = greedy_rollout(agent, mdp, mdp.initial_state, kEvalCap);
      records.push_back(make_record(cfg, seed, ++checkpoint, steps,
                                    steps <= kEvalCap ? 1.0 : 0.0));
    }
  }
  return records;
}

std::vector<RunRecord> run_maze_plan_seed(const ExperimentConfig& cfg, const TabularMDP& mdp,
                                          int seed) {
  const std::uint64_t run_seed = derive_seed(cfg.master_seed, seed);
  auto rng = make_rng(derive_seed(run_seed, 2));
  if (cfg.agent == AgentKind::Baseline) {
    QLearningAgent agent(mdp.state_count, mdp.action_count, cfg.agent_config);
    return maze_plan_checkpoints(cfg, mdp, agent, seed, rng);
  }
  EeaQLearningAgent agent(mdp.state_count, mdp.action_count, cfg.hyp_action,
                          make_exact_forward(mdp), make_exact_backward(mdp), cfg.agent_config);
  return maze_plan_checkpoints(cfg, mdp, agent, seed, rng);
}

// One vector-observation episode with act / observe / train per step.
template <typename AgentT, typename ObserveFn>
std::pair<long, double> dqn_episode(Env& env, AgentT& agent, const ObserveFn& observe,
                                    std::uint64_t episode_seed, int step_cap,
                                    std::mt19937_64& rng) {
  Observation obs = env.reset(episode_seed);
  long steps = 0;
  double ret = 0.0;
  bool done = false;
  while (!done && steps < step_cap) {
    const int action = agent.act(obs.vec, rng);
    StepResult result = env.step(action);
    observe(obs.vec, action, result.reward, result.obs.vec, result.done);
    for (int u = 0; u < agent.config().updates_per_step; ++u) agent.train_step(rng);
    ret += result.reward;
    obs = result.obs;
    done = result.done;
    ++steps;
  }
  return {steps, ret};
}

std::vector<RunRecord> run_cartpole_seed(const ExperimentConfig& cfg, int seed) {
  const std::uint64_t run_seed = derive_seed(cfg.master_seed, seed);
  auto rng_init = make_rng(derive_seed(run_seed, 1));
  auto rng = make_rng(derive_seed(run_seed, 2));
  CartpoleEnv env(cfg.step_cap);
  const std::vector<int> hidden{cfg.agent_config.hidden_width, cfg.agent_config.hidden_width};
  std::vector<RunRecord> records;

  if (cfg.agent == AgentKind::Baseline) {
    DqnAgent agent(4, cartpole_action::kCount, hidden, cfg.agent_config.activation,
                   cfg.agent_config, rng_init);
    for (int ep = 1; ep <= cfg.episodes; ++ep) {
      if (ep == cfg.agent_config.lr_decay_episode) agent.scale_learning_rate(0.1);
      auto [steps, ret] = dqn_episode(
          env, agent,
          [&](const Eigen::VectorXd& o, int a, double r, const Eigen::VectorXd& n, bool d) {
            agent.observe({o, a, r, n, d});
          },
          derive_seed(run_seed, 100000 + ep), cfg.step_cap, rng);
      records.push_back(make_record(cfg, seed, ep, steps, ret));
    }
    return records;
  }

  EeaDqnAgent agent(4, cartpole_action::kCount, cfg.hyp_action, hidden,
                    cfg.agent_config.activation, cfg.agent_config, rng_init);
  // Model-collection episodes: uniform random policy, counted on the x-axis.
  TransitionDataset model_data;
  std::vector<Transition> raw;
  std::uniform_int_distribution<int> random_action(0, cartpole_action::kCount - 1);
  for (int ep = 1; ep <= cfg.model_episodes; ++ep) {
    Observation obs = env.reset(derive_seed(run_seed, 100000 + ep));
    long steps = 0;
    double ret = 0.0;
    bool done = false;
    while (!done && steps < cfg.step_cap) {
      const int action = random_action(rng);
      StepResult result = env.step(action);
      model_data.append(obs.vec, action, result.obs.vec);
      raw.push_back({obs.vec, action, result.reward, result.obs.vec, result.done});
      ret += result.reward;
      obs = result.obs;
      done = result.done;
      ++steps;
    }
    records.push_back(make_record(cfg, seed, ep, steps, ret));
  }

  // Two simple linear models per direction of time, one for each action.
  VectorDynamicsModel fwd = VectorDynamicsModel::per_action_linear(cartpole_action::kCount, 4,
                                                                   rng_init);
  VectorDynamicsModel bwd = VectorDynamicsModel::per_action_linear(cartpole_action::kCount, 4,
                                                                   rng_init);
  OptimizerState model_opt = OptimizerState::adam(cfg.model_lr);
  train_forward(fwd, model_data, model_opt, cfg.model_epochs, 32, rng);
  train_backward(bwd, model_data, model_opt, cfg.model_epochs, 32, rng);
  agent.set_models(std::move(fwd), std::move(bwd));
  for (const Transition& t : raw) agent.observe(t.obs, t.action, t.reward, t.next_obs, t.done);

  for (int ep = cfg.model_episodes + 1; ep <= cfg.episodes; ++ep) {
    if (ep == cfg.agent_config.lr_decay_episode) agent.scale_learning_rate(0.1);
    auto [steps, ret] = dqn_episode(
        env, agent,
        [&](const Eigen::VectorXd& o, int a, double r, const Eigen::VectorXd& n, bool d) {
          agent.observe(o, a, r, n, d);
        },
        derive_seed(run_seed, 100000 + ep), cfg.step_cap, rng);
    records.push_back(make_record(cfg, seed, ep, steps, ret));
  }
  return records;
}

std::vector<int> predprey_value_hidden() { return {1024, 8, 1024}; }
std::vector<int> predprey_model_hidden() { return {512, 8, 512}; }

std::vector<RunRecord> run_predprey_seed(const ExperimentConfig& cfg,
                                         const VectorDynamicsModel* fwd,
                                         const VectorDynamicsModel* bwd, int seed) {
  const std::uint64_t run_seed = derive_seed(cfg.master_seed, seed);
  auto rng_init = make_rng(derive_seed(run_seed, 1));
  auto rng = make_rng(derive_seed(run_seed, 2));
  PredPreyEnv env(cfg.step_cap);
  std::vector<RunRecord> records;

  if (cfg.agent == AgentKind::Baseline) {
    DqnAgent agent(PredPreyEnv::kObsSize, predprey_action::kCount, predprey_value_hidden(),
                   cfg.agent_config.activation, cfg.agent_config, rng_init);
    for (int ep = 1; ep <= cfg.episodes; ++ep) {
      if (ep == cfg.agent_config.lr_decay_episode) agent.scale_learning_rate(0.1);
      auto [steps, ret] = dqn_episode(
          env, agent,
          [&](const Eigen::VectorXd& o, int a, double r, const Eigen::VectorXd& n, bool d) {
            agent.observe({o, a, r, n, d});
          },
          derive_seed(run_seed, 100000 + ep), cfg.step_cap, rng);
      records.push_back(make_record(cfg, seed, ep, steps, ret));
    }
    return records;
  }

  EeaDqnAgent agent(PredPreyEnv::kObsSize, predprey_action::kCount, cfg.hyp_action,
                    predprey_value_hidden(), cfg.agent_config.activation, cfg.agent_config,
                    rng_init);
  agent.set_models(*fwd, *bwd);  // one pretrained set reused across seeds
  for (int ep = 1; ep <= cfg.episodes; ++ep) {
    if (ep == cfg.agent_config.lr_decay_episode) agent.scale_learning_rate(0.1);
    auto [steps, ret] = dqn_episode(
        env, agent,
        [&](const Eigen::VectorXd& o, int a, double r, const Eigen::VectorXd& n, bool d) {
          agent.observe(o, a, r, n, d);
        },
        derive_seed(run_seed, 100000 + ep), cfg.step_cap, rng);
    records.push_back(make_record(cfg, seed, ep, steps, ret));
  }
  return records;
}

}  // namespace

std::pair<VectorDynamicsModel, VectorDynamicsModel> pretrain_predprey_models(
    const ExperimentConfig& cfg, bool force_retrain) {
  const std::string fwd_stem = "predprey-forward";
  const std::string bwd_stem = "predprey-backward";
  const std::string fwd_manifest = cfg.model_dir + "/" + fwd_stem + ".json";
  const std::string bwd_manifest = cfg.model_dir + "/" + bwd_stem + ".json";
  if (!force_retrain && std::filesystem::exists(fwd_manifest) &&
      std::filesystem::exists(bwd_manifest)) {
    return {load_dynamics_model(cfg.model_dir, fwd_stem),
            load_dynamics_model(cfg.model_dir, bwd_stem)};
  }

  auto rng = make_rng(derive_seed(cfg.master_seed, 999983));
  PredPreyEnv env(cfg.step_cap);
  TransitionDataset data;
  std::uniform_int_distribution<int> random_action(0, predprey_action::kCount - 1);
  long steps_collected = 0;
  std::uint64_t episode = 0;
  while (steps_collected < cfg.pretrain_steps) {
    Observation obs = env.reset(derive_seed(cfg.master_seed, 500000 + episode++));
    bool done = false;
    while (!done && steps_collected < cfg.pretrain_steps) {
      const int action = random_action(rng);
      StepResult result = env.step(action);
      data.append(obs.vec, action, result.obs.vec);
      obs = result.obs;
      done = result.done;
      ++steps_collected;
    }
  }

  VectorDynamicsModel fwd = VectorDynamicsModel::one_hot_net(
      predprey_action::kCount, PredPreyEnv::kObsSize, predprey_model_hidden(), Activation::Relu,
      rng);
  VectorDynamicsModel bwd = VectorDynamicsModel::one_hot_net(
      predprey_action::kCount, PredPreyEnv::kObsSize, predprey_model_hidden(), Activation::Relu,
      rng);
  OptimizerState opt = OptimizerState::adam(cfg.model_lr);
  train_forward(fwd, data, opt, cfg.model_epochs, 32, rng);
  train_backward(bwd, data, opt, cfg.model_epochs, 32, rng);

  ModelManifest manifest{"predprey", "forward", to_string(fwd.conditioning()),
                         cfg.pretrain_steps};
  save_dynamics_model(fwd, manifest, cfg.model_dir, fwd_stem);
  manifest.role = "backward";
  save_dynamics_model(bwd, manifest, cfg.model_dir, bwd_stem);
  return {fwd, bwd};
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& raw_config) {
  ExperimentConfig cfg = resolve_defaults(raw_config);
  cfg.validate();

  // Shared read-only inputs prepared before any worker starts.
  TabularMDP maze;
  VectorDynamicsModel predprey_fwd, predprey_bwd;
  if (cfg.experiment == ExperimentKind::MazeQ || cfg.experiment == ExperimentKind::MazePlan) {
    maze = maze_tabular_mdp(MazeLayout{}, cfg.agent_config.gamma);
  }
  if (cfg.experiment == ExperimentKind::PredPrey && cfg.agent == AgentKind::Eea) {
    std::tie(predprey_fwd, predprey_bwd) = pretrain_predprey_models(cfg);
  }

  auto run_seed_worker = [&](int seed) -> std::vector<RunRecord> {
    switch (cfg.experiment) {
      case ExperimentKind::MazeQ: return run_maze_q_seed(cfg, maze, seed);
      case ExperimentKind::MazePlan: return run_maze_plan_seed(cfg, maze, seed);
      case ExperimentKind::Cartpole: return run_cartpole_seed(cfg, seed);
      case ExperimentKind::PredPrey:
        return run_predprey_seed(cfg, &predprey_fwd, &predprey_bwd, seed);
    }
    return {};
  };

  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int workers = std::min(cfg.seeds, cfg.parallelism > 0 ? cfg.parallelism
                                                              : std::max(1, hw));
  std::vector<std::vector<RunRecord>> per_seed(cfg.seeds);
  std::atomic<int> next_seed{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker_loop = [&] {
    for (;;) {
      const int seed = next_seed.fetch_add(1);
      if (seed >= cfg.seeds) return;
      try {
        per_seed[seed] = run_seed_worker(seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (workers <= 1) {
    worker_loop();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker_loop);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<RunRecord> records;
  for (auto& part : per_seed) {
    records.insert(records.end(), part.begin(), part.end());
  }
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  // episode -> returns across seeds, episodes in ascending order.
  std::map<int, std::vector<double>> by_episode;
  std::map<int, std::vector<int>> seeds_by_episode;
  for (const auto& rec : records) {
    by_episode[rec.episode].push_back(rec.ret);
    seeds_by_episode[rec.episode].push_back(rec.seed);
  }
  std::size_t expected = 0;
  bool first = true;
  for (const auto& [episode, values] : by_episode) {
    if (first) {
      expected = values.size();
      first = false;
    } else if (values.size() != expected) {
      throw std::invalid_argument("summarize: ragged episode grids across seeds");
    }
  }

  std::vector<SummaryRow> rows;
  for (const auto& [episode, values] : by_episode) {
    SummaryRow row;
    row.episode = episode;
    row.n = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    row.mean = sum / row.n;
    if (row.n > 1) {
      double sq = 0.0;
      for (double v : values) sq += (v - row.mean) * (v - row.mean);
      row.stderr_ = std::sqrt(sq / (row.n - 1)) / std::sqrt(static_cast<double>(row.n));
    } else {
      row.stderr_ = 0.0;  // single seed: zero by convention
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace eea
