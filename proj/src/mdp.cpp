#include "eea/mdp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "eea/csv.hpp"

namespace eea {

namespace {
constexpr double kRowSumTolerance = 1e-12;
}

TabularMDP TabularMDP::zeros(int states, int actions, double discount) {
  if (states <= 0 || actions <= 0) {
    throw std::invalid_argument("TabularMDP: state and action counts must be positive");
  }
  TabularMDP mdp;
  mdp.state_count = states;
  mdp.action_count = actions;
  mdp.discount = discount;
  mdp.transition.assign(states, std::vector<std::vector<double>>(
                                    actions, std::vector<double>(states, 0.0)));
  mdp.reward.assign(states, std::vector<std::vector<double>>(
                                actions, std::vector<double>(states, 0.0)));
  return mdp;
}

void TabularMDP::set_transition(int s, int a, int next, double prob, double r) {
  if (!in_range(s, a) || next < 0 || next >= state_count) {
    throw std::invalid_argument("TabularMDP::set_transition: index out of range");
  }
  transition[s][a][next] = prob;
  reward[s][a][next] = r;
}

void TabularMDP::set_deterministic(int s, int a, int next, double r) {
  if (!in_range(s, a) || next < 0 || next >= state_count) {
    throw std::invalid_argument("TabularMDP::set_deterministic: index out of range");
  }
  std::fill(transition[s][a].begin(), transition[s][a].end(), 0.0);
  std::fill(reward[s][a].begin(), reward[s][a].end(), 0.0);
  transition[s][a][next] = 1.0;
  reward[s][a][next] = r;
}

void TabularMDP::make_terminal(int s) {
  terminal.insert(s);
  for (int a = 0; a < action_count; ++a) set_deterministic(s, a, s, 0.0);
}

bool TabularMDP::deterministic() const {
  for (int s = 0; s < state_count; ++s) {
    for (int a = 0; a < action_count; ++a) {
      int ones = 0;
      for (double p : transition[s][a]) {
        if (p == 1.0) {
          ++ones;
        } else if (p != 0.0) {
          return false;
        }
      }
      if (ones != 1) return false;
    }
  }
  return true;
}

int TabularMDP::successor(int s, int a) const {
  const auto& row = transition[s][a];
  for (int next = 0; next < state_count; ++next) {
    if (row[next] == 1.0) return next;
  }
  throw std::runtime_error("TabularMDP::successor: row (" + std::to_string(s) + ", " +
                           std::to_string(a) + ") is not deterministic");
}

void TabularMDP::validate() const {
  if (state_count <= 0 || action_count <= 0) {
    throw std::invalid_argument("TabularMDP: empty state or action space");
  }
  if (discount < 0.0 || discount > 1.0) {
    throw std::invalid_argument("TabularMDP: discount outside [0, 1]");
  }
  if (initial_state < 0 || initial_state >= state_count) {
    throw std::invalid_argument("TabularMDP: initial state out of range");
  }
  for (int s = 0; s < state_count; ++s) {
    for (int a = 0; a < action_count; ++a) {
      double sum = 0.0;
      for (int next = 0; next < state_count; ++next) {
        double p = transition[s][a][next];
        if (p < 0.0 || p > 1.0 || !std::isfinite(p)) {
          throw std::invalid_argument("TabularMDP: probability outside [0, 1] at (" +
                                      std::to_string(s) + ", " + std::to_string(a) + ")");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        throw std::invalid_argument("TabularMDP: row (" + std::to_string(s) + ", " +
                                    std::to_string(a) + ") sums to " + std::to_string(sum));
      }
    }
  }
  for (int t : terminal) {
    if (t < 0 || t >= state_count) {
      throw std::invalid_argument("TabularMDP: terminal state out of range");
    }
    for (int a = 0; a < action_count; ++a) {
      if (transition[t][a][t] != 1.0 || reward[t][a][t] != 0.0) {
        throw std::invalid_argument("TabularMDP: terminal state " + std::to_string(t) +
                                    " must self-loop with zero reward");
      }
    }
  }
}

void QTable::check_finite() const {
  if (!values.allFinite()) {
    throw std::runtime_error("QTable: non-finite entry after update");
  }
}

namespace {

// Strips '#' comments and splits into whitespace-separated tokens.
std::vector<std::string> tokenize(const std::string& line) {
  std::string body = line.substr(0, line.find('#'));
  std::istringstream stream(body);
  std::vector<std::string> tokens;
  std::string tok;
  while (stream >> tok) tokens.push_back(tok);
  return tokens;
}

}  // namespace

TabularMDP read_mdp(std::istream& in) {
  int states = -1, actions = -1, initial = 0;
  double discount = 0.95;
  std::vector<int> terminals;
  struct Row {
    int s, a, next;
    double prob, reward;
  };
  std::vector<Row> rows;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    try {
      if (tokens[0] == "states") {
        states = std::stoi(tokens.at(1));
      } else if (tokens[0] == "actions") {
        actions = std::stoi(tokens.at(1));
      } else if (tokens[0] == "discount") {
        discount = std::stod(tokens.at(1));
      } else if (tokens[0] == "terminal") {
        for (std::size_t i = 1; i < tokens.size(); ++i) terminals.push_back(std::stoi(tokens[i]));
      } else if (tokens[0] == "initial") {
        initial = std::stoi(tokens.at(1));
      } else if (tokens.size() == 5) {
        rows.push_back({std::stoi(tokens[0]), std::stoi(tokens[1]), std::stoi(tokens[2]),
                        std::stod(tokens[3]), std::stod(tokens[4])});
      } else {
        throw std::invalid_argument("unrecognized directive '" + tokens[0] + "'");
      }
    } catch (const std::exception& e) {
      throw std::invalid_argument("MDP parse error at line " + std::to_string(line_no) + ": " +
                                  e.what());
    }
  }
  if (states <= 0 || actions <= 0) {
    throw std::invalid_argument("MDP parse error: missing or invalid 'states'/'actions' header");
  }

  TabularMDP mdp = TabularMDP::zeros(states, actions, discount);
  mdp.initial_state = initial;
  for (const Row& r : rows) {
    if (r.s < 0 || r.s >= states || r.a < 0 || r.a >= actions || r.next < 0 || r.next >= states) {
      throw std::invalid_argument("MDP parse error: transition index out of range");
    }
    mdp.transition[r.s][r.a][r.next] = r.prob;
    mdp.reward[r.s][r.a][r.next] = r.reward;
  }
  for (int t : terminals) {
    if (t < 0 || t >= states) throw std::invalid_argument("MDP parse error: bad terminal index");
    mdp.terminal.insert(t);
    // Synthesize the mandatory self-loop when the file omits it.
    bool empty_rows = true;
    for (int a = 0; a < actions && empty_rows; ++a) {
      for (double p : mdp.transition[t][a]) {
        if (p != 0.0) empty_rows = false;
      }
    }
    if (empty_rows) {
      for (int a = 0; a < actions; ++a) mdp.set_deterministic(t, a, t, 0.0);
    }
  }
  mdp.validate();
  return mdp;
}

TabularMDP read_mdp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open MDP file: " + path);
  return read_mdp(in);
}

void write_mdp(const TabularMDP& mdp, std::ostream& out) {
  out << "states " << mdp.state_count << "\n";
  out << "actions " << mdp.action_count << "\n";
  out << "discount " << format_double(mdp.discount) << "\n";
  if (!mdp.terminal.empty()) {
    out << "terminal";
    for (int t : mdp.terminal) out << " " << t;
    out << "\n";
  }
  out << "initial " << mdp.initial_state << "\n";
  for (int s = 0; s < mdp.state_count; ++s) {
    for (int a = 0; a < mdp.action_count; ++a) {
      for (int next = 0; next < mdp.state_count; ++next) {
        double p = mdp.transition[s][a][next];
        if (p != 0.0) {
          out << s << " " << a << " " << next << " " << format_double(p) << " "
              << format_double(mdp.reward[s][a][next]) << "\n";
        }
      }
    }
  }
}

void write_mdp_file(const TabularMDP& mdp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open MDP file for writing: " + path);
  write_mdp(mdp, out);
}

}  // namespace eea
