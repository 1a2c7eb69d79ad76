#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eea/tabular_agents.hpp"

namespace eea {

enum class ExperimentKind { MazeQ, MazePlan, Cartpole, PredPrey };
enum class AgentKind { Baseline, Eea };

ExperimentKind experiment_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);
AgentKind agent_from_string(const std::string& name);
std::string to_string(AgentKind kind);

/// Everything a run needs. Unset fields (-1) resolve to per-experiment
/// defaults in `resolve_defaults`.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::MazeQ;
  AgentKind agent = AgentKind::Baseline;
  int seeds = 1;
  int episodes = -1;
  long planning_backups = -1;   // maze-plan budget
  int planning_eval_every = 25; // checkpoint spacing, in backups
  int hyp_action = -1;          // default: maze/predprey left, cartpole left
  int step_cap = -1;            // per-episode step cap
  AgentConfig agent_config;
  int model_episodes = 3;       // cartpole model-collection episodes
  long pretrain_steps = 10000;  // predator-prey random steps for models
  int model_epochs = -1;        // epochs over the model-training dataset
  double model_lr = -1.0;       // model optimizer step size
  std::string model_dir = "models";
  std::string out_path;         // default ./results/<experiment>-<agent>.csv
  std::uint64_t master_seed = 2024;
  int parallelism = 0;          // 0: hardware concurrency
  bool echo_config = true;      // write the effective config sidecar

  void validate() const;
  std::string default_out_path() const;
};

/// Fills unset fields with the documented per-experiment defaults and
/// appendix hyperparameters.
ExperimentConfig resolve_defaults(ExperimentConfig config);

/// One (algorithm, seed, episode) measurement.
struct RunRecord {
  std::string experiment;
  std::string agent;
  int seed = 0;
  int episode = 0;  // 1-based; maze-plan: checkpoint index
  long steps = 0;
  double ret = 0.0;
  // Reserved: always 0 so that outputs are bit-reproducible across runs and
  // degrees of parallelism.
  long wall_ms = 0;
};

struct SummaryRow {
  int episode = 0;
  double mean = 0.0;
  double stderr_ = 0.0;  // sample standard deviation / sqrt(seeds)
  int n = 0;
};

/// Runs every seed (possibly in parallel) and returns records merged in
/// seed order. Output is identical regardless of execution order or degree
/// of parallelism.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

/// Loads the predator-prey dynamics models from config.model_dir when their
/// manifests exist (unless `force_retrain`); otherwise collects
/// config.pretrain_steps random-action transitions, trains both models, and
/// saves them for reuse across seeds and runs. Returns (forward, backward).
std::pair<VectorDynamicsModel, VectorDynamicsModel> pretrain_predprey_models(
    const ExperimentConfig& config, bool force_retrain = false);

/// Per-episode mean and standard error across seeds. Throws on ragged
/// episode grids.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

}  // namespace eea
