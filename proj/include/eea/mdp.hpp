#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace eea {

/// Finite MDP with dense transition rows and (s, a, s') rewards.
///
/// Transition rows are probability vectors over next states and must sum to
/// one within 1e-12. Terminal states self-loop with probability one and zero
/// reward under every action.
struct TabularMDP {
  int state_count = 0;
  int action_count = 0;
  // transition[s][a][s'] — probability of reaching s' from (s, a).
  std::vector<std::vector<std::vector<double>>> transition;
  // reward[s][a][s'] — reward observed when that transition fires.
  std::vector<std::vector<std::vector<double>>> reward;
  double discount = 0.95;
  std::set<int> terminal;
  int initial_state = 0;

  static TabularMDP zeros(int states, int actions, double discount);

  void set_transition(int s, int a, int next, double prob, double r);
  /// Point-mass transition with reward; overwrites the whole row.
  void set_deterministic(int s, int a, int next, double r);
  /// Marks `s` terminal and rewrites its rows as zero-reward self-loops.
  void make_terminal(int s);

  bool is_terminal(int s) const { return terminal.count(s) > 0; }
  bool in_range(int s, int a) const {
    return s >= 0 && s < state_count && a >= 0 && a < action_count;
  }

  /// True iff every transition row has a single entry equal to 1.
  bool deterministic() const;
  /// Deterministic successor of (s, a); throws if the row is not one-hot.
  int successor(int s, int a) const;
  double transition_prob(int s, int a, int next) const { return transition[s][a][next]; }
  double reward_for(int s, int a, int next) const { return reward[s][a][next]; }

  /// Checks all structural invariants; throws std::invalid_argument on failure.
  void validate() const;
};

/// Dense action-value table plus per-entry visit counts.
struct QTable {
  Eigen::MatrixXd values;
  Eigen::MatrixXi visits;

  QTable() = default;
  QTable(int states, int actions)
      : values(Eigen::MatrixXd::Zero(states, actions)),
        visits(Eigen::MatrixXi::Zero(states, actions)) {}

  int state_count() const { return static_cast<int>(values.rows()); }
  int action_count() const { return static_cast<int>(values.cols()); }

  /// Throws std::runtime_error if any value is NaN or infinite.
  void check_finite() const;
};

/// Plain-text MDP interchange format.
///
/// Header lines `states N`, `actions M`, `discount G`, `terminal s...`,
/// `initial s`, then one line per transition `s a s' prob reward`.
/// Whitespace-separated; '#' starts a comment. Terminal self-loop rows may
/// be omitted and are synthesized on load.
TabularMDP read_mdp(std::istream& in);
TabularMDP read_mdp_file(const std::string& path);
void write_mdp(const TabularMDP& mdp, std::ostream& out);
void write_mdp_file(const TabularMDP& mdp, const std::string& path);

}  // namespace eea
