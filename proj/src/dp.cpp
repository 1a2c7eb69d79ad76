#include "eea/dp.hpp"

#include <cmath>
#include <stdexcept>

namespace eea {

QTable value_iteration(const TabularMDP& mdp, double tolerance, long max_iterations) {
  if (tolerance <= 0.0) throw std::invalid_argument("value_iteration: tolerance must be > 0");
  mdp.validate();

  const int S = mdp.state_count;
  const int A = mdp.action_count;
  QTable q(S, A);
  Eigen::MatrixXd next(S, A);

  for (long iter = 0; iter < max_iterations; ++iter) {
    Eigen::VectorXd v(S);
    for (int s = 0; s < S; ++s) {
      v(s) = mdp.is_terminal(s) ? 0.0 : q.values.row(s).maxCoeff();
    }
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        double acc = 0.0;
        const auto& probs = mdp.transition[s][a];
        const auto& rewards = mdp.reward[s][a];
        for (int nxt = 0; nxt < S; ++nxt) {
          double p = probs[nxt];
          if (p != 0.0) acc += p * (rewards[nxt] + mdp.discount * v(nxt));
        }
        next(s, a) = mdp.is_terminal(s) ? 0.0 : acc;
      }
    }
    double residual = (next - q.values).cwiseAbs().maxCoeff();
    q.values = next;
    if (residual < tolerance) {
      q.check_finite();
      return q;
    }
  }
  throw std::runtime_error(
      "value_iteration: no convergence after " + std::to_string(max_iterations) +
      " sweeps; the MDP has discount 1 with no reachable terminal state, or the "
      "tolerance is below attainable precision");
}

int greedy_action(const QTable& q, int state) {
  int best = 0;
  double best_value = q.values(state, 0);
  for (int a = 1; a < q.action_count(); ++a) {
    if (q.values(state, a) > best_value) {
      best_value = q.values(state, a);
      best = a;
    }
  }
  return best;
}

int greedy_path_length(const TabularMDP& mdp, const QTable& q, int start, int step_cap) {
  int state = start;
  for (int step = 0; step < step_cap; ++step) {
    if (mdp.is_terminal(state)) return step;
    state = mdp.successor(state, greedy_action(q, state));
  }
  return mdp.is_terminal(state) ? step_cap : step_cap + 1;
}

}  // namespace eea
