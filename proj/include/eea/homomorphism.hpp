#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "eea/mdp.hpp"

namespace eea {

/// Exact one-step predictors over state indices. Both return nullopt where
/// no prediction exists (partial models are first-class at the tabular
/// level; nothing is fabricated).
using ExactForwardFn = std::function<std::optional<int>(int state, int action)>;
using ExactBackwardFn = std::function<std::optional<int>(int next_state, int action)>;

/// Per-pair image (sigma_a(s), g_s(a)). The action map is constant equal to
/// `hypothetical_action` wherever the state map is present, so only the
/// state images are stored.
struct HomomorphismMap {
  int state_count = 0;
  int action_count = 0;
  int hypothetical_action = 0;
  std::vector<std::vector<std::optional<int>>> state_map;  // [s][a]

  bool mapped(int s, int a) const { return state_map[s][a].has_value(); }
  int state_image(int s, int a) const { return *state_map[s][a]; }
  int action_image(int, int) const { return hypothetical_action; }
};

struct HomomorphismReport {
  struct TransitionViolation {
    int s, a;
    int block_representative;  // next-state block where the sums differ
    double lhs, rhs;
  };
  struct RewardViolation {
    int s, a, next;
    double lhs, rhs;
  };

  long checked_pairs = 0;
  long passed_pairs = 0;
  std::vector<TransitionViolation> transition_violations;
  std::vector<RewardViolation> reward_violations;
  std::vector<std::pair<int, int>> unmapped_pairs;

  /// Number of distinct pairs with at least one violation; a pair failing
  /// both the transition and the reward condition counts once.
  long violating_pairs() const;
};

/// Builds the reduced MDP and its map for the hypothetical action `a_hyp`.
///
/// The image of (s, a) is s when a = a_hyp (the identity branch of the value
/// prediction algorithm, no model query), and bwd(fwd(s, a), a_hyp)
/// otherwise. Pairs where either model declines are recorded as unmapped and
/// keep their original rows in the reduced MDP (border fallback); so do
/// non-identity pairs at terminal states, whose self-loops carry no real
/// dynamics. Mapped rows of the reduced MDP are rewritten to the rows of
/// their image pair.
std::pair<TabularMDP, HomomorphismMap> build_reduced_mdp(const TabularMDP& mdp,
                                                         const ExactForwardFn& fwd,
                                                         const ExactBackwardFn& bwd, int a_hyp);

/// Verifies the two homomorphism conditions for every mapped pair.
///
/// Next states are partitioned into blocks keyed by their deterministic
/// successor under a_hyp (states without a one-hot a_hyp row are singleton
/// blocks), and the transition sums are compared per block:
///   sum_{x in B} reduced.P(image(s,a), a_hyp, x) = sum_{x in B} mdp.P(s, a, x).
/// In the deterministic case every comparison degenerates to a 0/1 equality.
/// Rewards are compared exactly on the support of P(s, a, .). Unmapped pairs
/// are listed, never failed.
HomomorphismReport check_homomorphism(const TabularMDP& mdp, const TabularMDP& reduced,
                                      const HomomorphismMap& map);

/// Max over mapped pairs of |Q*_mdp(s, a) - Q*_reduced(image(s, a), a_hyp)|,
/// with both Q* computed by value_iteration at tolerance / 10.
double check_value_equivalence(const TabularMDP& mdp, const TabularMDP& reduced,
                               const HomomorphismMap& map, double tolerance);

struct AssumptionAuditReport {
  /// Pairs (s, a) whose transition row is not a point mass. Terminal
  /// self-loops are bookkeeping, not dynamics, and are skipped.
  std::vector<std::pair<int, int>> determinism_violations;
  /// States with no distinct predecessor under the hypothetical action.
  /// Blocked self-transitions do not count as predecessors here, matching
  /// the geometric reading of "reachable by travelling with a_hyp".
  std::vector<int> states_without_hypothetical_predecessor;
  /// Non-terminal pairs (s, a), a != a_hyp, whose successor lies in the set
  /// above; these are exactly the pairs the reduction cannot collapse.
  std::vector<std::pair<int, int>> pairs_without_hypothetical;
  struct RewardDependence {
    int next;
    double min_reward, max_reward;
  };
  /// Next states reached with differing rewards from different (s, a) pairs.
  std::vector<RewardDependence> reward_dependence_violations;
};

AssumptionAuditReport assumption_audit(const TabularMDP& mdp, int a_hyp);

/// Q-storage accounting for the tabular reduction: one slot per distinct
/// hypothetical image of a mapped pair plus one slot per unmapped pair,
/// both restricted to non-terminal source states.
struct ReducedSlotCount {
  long hypothetical_slots = 0;
  long fallback_slots = 0;
  long total() const { return hypothetical_slots + fallback_slots; }
};

ReducedSlotCount count_reduced_q_slots(const TabularMDP& mdp, const HomomorphismMap& map);

}  // namespace eea
