#include "eea/homomorphism.hpp"

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "eea/dp.hpp"

namespace eea {

long HomomorphismReport::violating_pairs() const {
  std::set<std::pair<int, int>> pairs;
  for (const auto& v : transition_violations) pairs.insert({v.s, v.a});
  for (const auto& v : reward_violations) pairs.insert({v.s, v.a});
  return static_cast<long>(pairs.size());
}

std::pair<TabularMDP, HomomorphismMap> build_reduced_mdp(const TabularMDP& mdp,
                                                         const ExactForwardFn& fwd,
                                                         const ExactBackwardFn& bwd, int a_hyp) {
  mdp.validate();
  if (!mdp.deterministic()) {
    throw std::invalid_argument("build_reduced_mdp: MDP must be deterministic");
  }
  if (a_hyp < 0 || a_hyp >= mdp.action_count) {
    throw std::invalid_argument("build_reduced_mdp: hypothetical action out of range");
  }

  HomomorphismMap map;
  map.state_count = mdp.state_count;
  map.action_count = mdp.action_count;
  map.hypothetical_action = a_hyp;
  map.state_map.assign(mdp.state_count,
                       std::vector<std::optional<int>>(mdp.action_count, std::nullopt));

  TabularMDP reduced = mdp;

  for (int s = 0; s < mdp.state_count; ++s) {
    for (int a = 0; a < mdp.action_count; ++a) {
      if (a == a_hyp) {
        map.state_map[s][a] = s;  // identity branch, no model query
        continue;
      }
      if (mdp.is_terminal(s)) continue;  // self-loops carry no real dynamics
      std::optional<int> next = fwd(s, a);
      if (!next) continue;
      std::optional<int> hyp = bwd(*next, a_hyp);
      if (!hyp) continue;  // recorded as unmapped, never fabricated
      map.state_map[s][a] = *hyp;
      reduced.transition[s][a] = mdp.transition[*hyp][a_hyp];
      reduced.reward[s][a] = mdp.reward[*hyp][a_hyp];
    }
  }
  return {std::move(reduced), std::move(map)};
}

namespace {

// Block id per state: states sharing a deterministic successor under a_hyp
// share a block; states without a one-hot a_hyp row are singletons.
std::vector<int> successor_blocks(const TabularMDP& mdp, int a_hyp) {
  std::vector<int> block(mdp.state_count);
  std::map<int, int> by_successor;
  int next_id = 0;
  for (int s = 0; s < mdp.state_count; ++s) {
    const auto& row = mdp.transition[s][a_hyp];
    int succ = -1;
    int ones = 0;
    bool point_mass = true;
    for (int nxt = 0; nxt < mdp.state_count; ++nxt) {
      if (row[nxt] == 1.0) {
        succ = nxt;
        ++ones;
      } else if (row[nxt] != 0.0) {
        point_mass = false;
      }
    }
    if (point_mass && ones == 1) {
      auto [it, inserted] = by_successor.try_emplace(succ, next_id);
      if (inserted) ++next_id;
      block[s] = it->second;
    } else {
      block[s] = next_id++;
    }
  }
  return block;
}

}  // namespace

HomomorphismReport check_homomorphism(const TabularMDP& mdp, const TabularMDP& reduced,
                                      const HomomorphismMap& map) {
  if (map.state_count != mdp.state_count || map.action_count != mdp.action_count ||
      reduced.state_count != mdp.state_count || reduced.action_count != mdp.action_count) {
    throw std::invalid_argument("check_homomorphism: shape mismatch between MDPs and map");
  }

  const std::vector<int> block = successor_blocks(mdp, map.hypothetical_action);
  int block_count = 0;
  for (int b : block) block_count = std::max(block_count, b + 1);
  std::vector<int> representative(block_count, -1);
  for (int s = 0; s < mdp.state_count; ++s) {
    if (representative[block[s]] < 0) representative[block[s]] = s;
  }

  HomomorphismReport report;
  std::vector<double> lhs_sum(block_count), rhs_sum(block_count);

  for (int s = 0; s < mdp.state_count; ++s) {
    for (int a = 0; a < mdp.action_count; ++a) {
      if (!map.mapped(s, a)) {
        report.unmapped_pairs.emplace_back(s, a);
        continue;
      }
      ++report.checked_pairs;
      const int image = map.state_image(s, a);
      const int a_hyp = map.action_image(s, a);
      bool ok = true;

      std::fill(lhs_sum.begin(), lhs_sum.end(), 0.0);
      std::fill(rhs_sum.begin(), rhs_sum.end(), 0.0);
      for (int nxt = 0; nxt < mdp.state_count; ++nxt) {
        lhs_sum[block[nxt]] += reduced.transition[image][a_hyp][nxt];
        rhs_sum[block[nxt]] += mdp.transition[s][a][nxt];
      }
      for (int b = 0; b < block_count; ++b) {
        if (lhs_sum[b] != rhs_sum[b]) {
          report.transition_violations.push_back({s, a, representative[b], lhs_sum[b], rhs_sum[b]});
          ok = false;
        }
      }
      for (int nxt = 0; nxt < mdp.state_count; ++nxt) {
        if (mdp.transition[s][a][nxt] == 0.0) continue;
        double lhs = reduced.reward[image][a_hyp][nxt];
        double rhs = mdp.reward[s][a][nxt];
        if (lhs != rhs) {
          report.reward_violations.push_back({s, a, nxt, lhs, rhs});
          ok = false;
        }
      }
      if (ok) ++report.passed_pairs;
    }
  }
  return report;
}

double check_value_equivalence(const TabularMDP& mdp, const TabularMDP& reduced,
                               const HomomorphismMap& map, double tolerance) {
  if (tolerance <= 0.0) {
    throw std::invalid_argument("check_value_equivalence: tolerance must be > 0");
  }
  QTable q_full = value_iteration(mdp, tolerance / 10.0);
  QTable q_reduced = value_iteration(reduced, tolerance / 10.0);

  double gap = 0.0;
  for (int s = 0; s < mdp.state_count; ++s) {
    for (int a = 0; a < mdp.action_count; ++a) {
      if (!map.mapped(s, a)) continue;
      double diff = std::abs(q_full.values(s, a) -
                             q_reduced.values(map.state_image(s, a), map.action_image(s, a)));
      gap = std::max(gap, diff);
    }
  }
  return gap;
}

AssumptionAuditReport assumption_audit(const TabularMDP& mdp, int a_hyp) {
  if (a_hyp < 0 || a_hyp >= mdp.action_count) {
    throw std::invalid_argument("assumption_audit: hypothetical action out of range");
  }
  AssumptionAuditReport report;

  // Assumption: transitions are deterministic.
  for (int s = 0; s < mdp.state_count; ++s) {
    if (mdp.is_terminal(s)) continue;
    for (int a = 0; a < mdp.action_count; ++a) {
      int ones = 0;
      bool point_mass = true;
      for (double p : mdp.transition[s][a]) {
        if (p == 1.0) {
          ++ones;
        } else if (p != 0.0) {
          point_mass = false;
        }
      }
      if (!point_mass || ones != 1) report.determinism_violations.emplace_back(s, a);
    }
  }

  // Assumption: every state has a hypothetical predecessor. A state counts
  // as reachable only via a distinct predecessor; blocked self-transitions
  // do not qualify.
  std::set<int> unreachable;
  for (int target = 0; target < mdp.state_count; ++target) {
    bool found = false;
    for (int s = 0; s < mdp.state_count && !found; ++s) {
      if (s == target) continue;
      if (mdp.transition[s][a_hyp][target] == 1.0) found = true;
    }
    if (!found) {
      report.states_without_hypothetical_predecessor.push_back(target);
      unreachable.insert(target);
    }
  }
  for (int s = 0; s < mdp.state_count; ++s) {
    if (mdp.is_terminal(s)) continue;
    for (int a = 0; a < mdp.action_count; ++a) {
      if (a == a_hyp) continue;
      const auto& row = mdp.transition[s][a];
      for (int nxt = 0; nxt < mdp.state_count; ++nxt) {
        if (row[nxt] == 1.0 && unreachable.count(nxt)) {
          report.pairs_without_hypothetical.emplace_back(s, a);
          break;
        }
      }
    }
  }

  // Assumption: rewards depend only on the state transitioned into.
  for (int nxt = 0; nxt < mdp.state_count; ++nxt) {
    double lo = 0.0, hi = 0.0;
    bool seen = false;
    for (int s = 0; s < mdp.state_count; ++s) {
      if (mdp.is_terminal(s)) continue;
      for (int a = 0; a < mdp.action_count; ++a) {
        if (mdp.transition[s][a][nxt] == 0.0) continue;
        double r = mdp.reward[s][a][nxt];
        if (!seen) {
          lo = hi = r;
          seen = true;
        } else {
          lo = std::min(lo, r);
          hi = std::max(hi, r);
        }
      }
    }
    if (seen && lo != hi) report.reward_dependence_violations.push_back({nxt, lo, hi});
  }
  return report;
}

ReducedSlotCount count_reduced_q_slots(const TabularMDP& mdp, const HomomorphismMap& map) {
  ReducedSlotCount count;
  std::set<int> images;
  for (int s = 0; s < mdp.state_count; ++s) {
    if (mdp.is_terminal(s)) continue;
    for (int a = 0; a < mdp.action_count; ++a) {
      if (map.mapped(s, a)) {
        images.insert(map.state_image(s, a));
      } else {
        ++count.fallback_slots;
      }
    }
  }
  count.hypothetical_slots = static_cast<long>(images.size());
  return count;
}

}  // namespace eea
