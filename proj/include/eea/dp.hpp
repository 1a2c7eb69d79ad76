#pragma once

#include "eea/mdp.hpp"

namespace eea {

/// Synchronous value iteration to a max-norm Bellman residual below
/// `tolerance`. Deterministic given inputs. Aborts with a diagnostic after
/// `max_iterations` sweeps, which only happens when discount = 1 and no
/// terminal state absorbs the returns.
QTable value_iteration(const TabularMDP& mdp, double tolerance,
                       long max_iterations = 1000000);

/// Greedy action with ties broken toward the lowest action index.
int greedy_action(const QTable& q, int state);

/// Steps the greedy policy from `start` until a terminal state or `step_cap`.
/// Returns the number of steps taken, or step_cap + 1 when no terminal state
/// was reached. Requires a deterministic MDP.
int greedy_path_length(const TabularMDP& mdp, const QTable& q, int start, int step_cap);

}  // namespace eea
