#include "eea/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "eea/config_file.hpp"
#include "eea/csv.hpp"
#include "eea/dynamics.hpp"
#include "eea/experiment.hpp"
#include "eea/homomorphism.hpp"

namespace eea {

namespace {

struct CommonFlags {
  std::string config_file;
  std::string agent, optimizer, out;
  int seeds = -1, episodes = -1, hyp_action = -1, parallelism = -1;
  long master_seed = -1;
  double alpha = -1, gamma = -1, epsilon = -1;
  bool planning = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_file, "config file (key = value lines)");
  cmd->add_option("--agent", flags.agent, "baseline | eea");
  cmd->add_option("--seeds", flags.seeds, "number of independent seeds");
  cmd->add_option("--episodes", flags.episodes, "episodes per seed");
  cmd->add_option("--hyp-action", flags.hyp_action, "hypothetical action index");
  cmd->add_option("--out", flags.out, "output CSV path");
  cmd->add_option("--optimizer", flags.optimizer, "sgd | adam | rmsprop");
  cmd->add_option("--master-seed", flags.master_seed, "master seed");
  cmd->add_option("--parallelism", flags.parallelism, "worker threads (0 = hardware)");
  cmd->add_option("--alpha", flags.alpha, "learning rate");
  cmd->add_option("--gamma", flags.gamma, "discount factor");
  cmd->add_option("--epsilon", flags.epsilon, "exploration rate");
}

ConfigMap merge_flags(const CommonFlags& flags, const std::string& experiment) {
  ConfigMap map;
  if (!flags.config_file.empty()) map = parse_config_file(flags.config_file);
  map["experiment"] = experiment;  // the subcommand wins
  if (!flags.agent.empty()) map["agent"] = flags.agent;
  if (flags.seeds >= 0) map["seeds"] = std::to_string(flags.seeds);
  if (flags.episodes >= 0) map["episodes"] = std::to_string(flags.episodes);
  if (flags.hyp_action >= 0) map["hyp_action"] = std::to_string(flags.hyp_action);
  if (!flags.out.empty()) map["out"] = flags.out;
  if (!flags.optimizer.empty()) map["optimizer"] = flags.optimizer;
  if (flags.master_seed >= 0) map["master_seed"] = std::to_string(flags.master_seed);
  if (flags.parallelism >= 0) map["parallelism"] = std::to_string(flags.parallelism);
  if (flags.alpha >= 0) map["alpha"] = format_double(flags.alpha);
  if (flags.gamma >= 0) map["gamma"] = format_double(flags.gamma);
  if (flags.epsilon >= 0) map["epsilon"] = format_double(flags.epsilon);
  return map;
}

int run_and_write(const ConfigMap& map) {
  ExperimentConfig config = config_from_map(map);
  const auto records = run_experiment(config);

  const std::filesystem::path out(config.out_path);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  write_csv(records, config.out_path);

  std::filesystem::path summary = out;
  summary.replace_extension();
  summary += "-summary.csv";
  write_summary_csv(summarize(records), summary.string());

  if (config.echo_config) {
    std::ofstream sidecar(config.out_path + ".config");
    sidecar << render_config(config);
  }
  std::cout << "wrote " << records.size() << " records to " << config.out_path << "\n";
  return 0;
}

int run_verify(const std::string& mdp_path, int hyp_action, double tolerance) {
  TabularMDP mdp = read_mdp_file(mdp_path);
  if (hyp_action < 0 || hyp_action >= mdp.action_count) {
    std::cout << "verify: hypothetical action out of range\n";
    return 1;
  }
  auto [reduced, map] = build_reduced_mdp(mdp, make_exact_forward(mdp), make_exact_backward(mdp),
                                          hyp_action);
  const HomomorphismReport report = check_homomorphism(mdp, reduced, map);
  const double gap = check_value_equivalence(mdp, reduced, map, tolerance);
  const AssumptionAuditReport audit = assumption_audit(mdp, hyp_action);
  const ReducedSlotCount slots = count_reduced_q_slots(mdp, map);

  std::cout << "homomorphism: checked " << report.checked_pairs << " pairs, passed "
            << report.passed_pairs << ", transition violations "
            << report.transition_violations.size() << ", reward violations "
            << report.reward_violations.size() << ", unmapped " << report.unmapped_pairs.size()
            << "\n";
  std::cout << "value equivalence gap: " << format_double(gap) << " (tolerance "
            << format_double(tolerance) << ")\n";
  std::cout << "assumption audit: determinism violations "
            << audit.determinism_violations.size() << ", states without hypothetical predecessor "
            << audit.states_without_hypothetical_predecessor.size()
            << ", pairs without hypothetical " << audit.pairs_without_hypothetical.size()
            << ", reward dependence violations " << audit.reward_dependence_violations.size()
            << "\n";
  std::cout << "reduced Q slots: " << slots.total() << " (hypothetical "
            << slots.hypothetical_slots << " + fallback " << slots.fallback_slots << ") of "
            << static_cast<long>(mdp.state_count) * mdp.action_count << " full-table entries\n";

  if (report.violating_pairs() > 0) {
    std::cout << "verify: FAILED, homomorphism violations present\n";
    return 1;
  }
  if (gap >= tolerance) {
    std::cout << "verify: FAILED, value-equivalence gap above tolerance\n";
    return 1;
  }
  std::cout << "verify: OK\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"equivalent-effect abstraction laboratory"};
  app.require_subcommand(1);

  CommonFlags maze_flags, cartpole_flags, predprey_flags;

  CLI::App* maze = app.add_subcommand("maze", "tabular maze experiments");
  add_common_flags(maze, maze_flags);
  maze->add_flag("--planning", maze_flags.planning, "Q-planning instead of Q-learning");

  CLI::App* cartpole = app.add_subcommand("cartpole", "cartpole DQN experiment");
  add_common_flags(cartpole, cartpole_flags);

  CLI::App* predprey = app.add_subcommand("predprey", "stochastic predator-prey experiment");
  add_common_flags(predprey, predprey_flags);

  std::string pretrain_dir = "models";
  long pretrain_steps = -1;
  int pretrain_epochs = -1;
  long pretrain_seed = -1;
  CLI::App* pretrain = app.add_subcommand("pretrain-models",
                                          "train predator-prey dynamics models");
  pretrain->add_option("--model-dir", pretrain_dir, "output directory");
  pretrain->add_option("--steps", pretrain_steps, "random-action steps to collect");
  pretrain->add_option("--epochs", pretrain_epochs, "training epochs");
  pretrain->add_option("--master-seed", pretrain_seed, "master seed");

  std::string verify_mdp;
  int verify_hyp = 2;
  double verify_tolerance = 1e-8;
  CLI::App* verify = app.add_subcommand("verify", "check the homomorphism on an MDP file");
  verify->add_option("mdp", verify_mdp, "TabularMDP text file")->required();
  verify->add_option("--hyp-action", verify_hyp, "hypothetical action index");
  verify->add_option("--tolerance", verify_tolerance, "value-equivalence tolerance");

  try {
    app.parse(argc, argv);

    if (maze->parsed()) {
      return run_and_write(merge_flags(maze_flags, maze_flags.planning ? "maze-plan" : "maze-q"));
    }
    if (cartpole->parsed()) return run_and_write(merge_flags(cartpole_flags, "cartpole"));
    if (predprey->parsed()) return run_and_write(merge_flags(predprey_flags, "predprey"));
    if (pretrain->parsed()) {
      ConfigMap map{{"experiment", "predprey"}, {"agent", "eea"}};
      if (!pretrain_dir.empty()) map["model_dir"] = pretrain_dir;
      if (pretrain_steps >= 0) map["pretrain_steps"] = std::to_string(pretrain_steps);
      if (pretrain_epochs >= 0) map["model_epochs"] = std::to_string(pretrain_epochs);
      if (pretrain_seed >= 0) map["master_seed"] = std::to_string(pretrain_seed);
      ExperimentConfig config = config_from_map(map);
      pretrain_predprey_models(config, /*force_retrain=*/true);
      std::cout << "wrote dynamics models to " << config.model_dir << "\n";
      return 0;
    }
    if (verify->parsed()) return run_verify(verify_mdp, verify_hyp, verify_tolerance);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace eea
