#include "eea/dynamics.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "eea/snapshot.hpp"

namespace eea {

std::optional<int> exact_forward_lookup(const TabularMDP& mdp, int s, int a) {
  if (!mdp.in_range(s, a)) throw std::invalid_argument("exact_forward_lookup: out of range");
  const auto& row = mdp.transition[s][a];
  for (int next = 0; next < mdp.state_count; ++next) {
    if (row[next] == 1.0) return next;
  }
  return std::nullopt;
}

std::optional<int> exact_backward_lookup(const TabularMDP& mdp, int next, int a,
                                         bool allow_self_predecessor) {
  if (!mdp.in_range(next, a)) throw std::invalid_argument("exact_backward_lookup: out of range");
  std::optional<int> distinct;
  bool self_qualifies = false;
  for (int s = 0; s < mdp.state_count; ++s) {
    if (mdp.transition[s][a][next] != 1.0) continue;
    if (s == next) {
      self_qualifies = true;
      continue;
    }
    if (distinct) {
      throw std::runtime_error("exact_backward_lookup: dynamics not invertible at (s'=" +
                               std::to_string(next) + ", a=" + std::to_string(a) +
                               "): multiple distinct predecessors");
    }
    distinct = s;
  }
  if (distinct) return distinct;
  if (self_qualifies && allow_self_predecessor) return next;
  return std::nullopt;
}

ExactForwardFn make_exact_forward(const TabularMDP& mdp) {
  return [&mdp](int s, int a) { return exact_forward_lookup(mdp, s, a); };
}

ExactBackwardFn make_exact_backward(const TabularMDP& mdp, bool allow_self_predecessor) {
  return [&mdp, allow_self_predecessor](int next, int a) {
    return exact_backward_lookup(mdp, next, a, allow_self_predecessor);
  };
}

std::optional<int> hypothetical_state(const ExactForwardFn& fwd, const ExactBackwardFn& bwd,
                                      int s, int a, int a_hyp) {
  if (a == a_hyp) return s;
  std::optional<int> next = fwd(s, a);
  if (!next) return std::nullopt;
  return bwd(*next, a_hyp);
}

void TransitionDataset::append(const Eigen::VectorXd& state, int action,
                               const Eigen::VectorXd& next_state) {
  if (actions_.empty() && states_.rows() == 0) {
    states_.resize(state.size(), 8);
    next_states_.resize(next_state.size(), 8);
  }
  if (state.size() != states_.rows() || next_state.size() != next_states_.rows()) {
    throw std::invalid_argument("TransitionDataset: inhomogeneous shapes");
  }
  const long n = size();
  if (n == states_.cols()) {
    states_.conservativeResize(Eigen::NoChange, 2 * n);
    next_states_.conservativeResize(Eigen::NoChange, 2 * n);
  }
  states_.col(n) = state;
  next_states_.col(n) = next_state;
  actions_.push_back(action);
}

ActionConditioning conditioning_from_string(const std::string& name) {
  if (name == "per_action_linear") return ActionConditioning::PerActionLinear;
  if (name == "one_hot_net") return ActionConditioning::OneHotConcatNet;
  throw std::invalid_argument("unknown action conditioning: " + name);
}

std::string to_string(ActionConditioning conditioning) {
  return conditioning == ActionConditioning::PerActionLinear ? "per_action_linear"
                                                             : "one_hot_net";
}

VectorDynamicsModel VectorDynamicsModel::per_action_linear(int action_count, int obs_size,
                                                           std::mt19937_64& rng) {
  VectorDynamicsModel model;
  model.conditioning_ = ActionConditioning::PerActionLinear;
  model.action_count_ = action_count;
  model.obs_size_ = obs_size;
  for (int a = 0; a < action_count; ++a) {
    LinearModel lm(obs_size, obs_size);
    lm.init_uniform(rng);
    model.linear_.push_back(std::move(lm));
  }
  return model;
}

VectorDynamicsModel VectorDynamicsModel::one_hot_net(int action_count, int obs_size,
                                                     const std::vector<int>& hidden_sizes,
                                                     Activation hidden_activation,
                                                     std::mt19937_64& rng) {
  VectorDynamicsModel model;
  model.conditioning_ = ActionConditioning::OneHotConcatNet;
  model.action_count_ = action_count;
  model.obs_size_ = obs_size;
  std::vector<int> sizes;
  sizes.push_back(obs_size + action_count);
  sizes.insert(sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  sizes.push_back(obs_size);
  model.net_ = DenseNet::mlp(sizes, hidden_activation);
  model.net_.init_uniform(rng);
  return model;
}

namespace {

Eigen::VectorXd concat_one_hot(const Eigen::VectorXd& obs, int action, int action_count) {
  Eigen::VectorXd input = Eigen::VectorXd::Zero(obs.size() + action_count);
  input.head(obs.size()) = obs;
  input(obs.size() + action) = 1.0;
  return input;
}

}  // namespace

Eigen::VectorXd VectorDynamicsModel::predict(const Eigen::VectorXd& obs, int action) const {
  if (action < 0 || action >= action_count_) {
    throw std::invalid_argument("VectorDynamicsModel::predict: action out of range");
  }
  if (conditioning_ == ActionConditioning::PerActionLinear) {
    return linear_[action].predict(obs);
  }
  return net_.forward(concat_one_hot(obs, action, action_count_));
}

Eigen::MatrixXd VectorDynamicsModel::predict_batch(Eigen::Ref<const Eigen::MatrixXd> obs,
                                                   const std::vector<int>& actions) const {
  if (obs.cols() != static_cast<long>(actions.size())) {
    throw std::invalid_argument("VectorDynamicsModel::predict_batch: shape mismatch");
  }
  if (conditioning_ == ActionConditioning::PerActionLinear) {
    Eigen::MatrixXd out(obs_size_, obs.cols());
    for (long i = 0; i < obs.cols(); ++i) out.col(i) = linear_[actions[i]].predict(obs.col(i));
    return out;
  }
  Eigen::MatrixXd inputs = Eigen::MatrixXd::Zero(obs_size_ + action_count_, obs.cols());
  inputs.topRows(obs_size_) = obs;
  for (long i = 0; i < obs.cols(); ++i) inputs(obs_size_ + actions[i], i) = 1.0;
  return net_.forward_batch(inputs);
}

double VectorDynamicsModel::dataset_mse(const TransitionDataset& data, bool backward_role) const {
  Eigen::Ref<const Eigen::MatrixXd> inputs = backward_role ? data.next_states() : data.states();
  Eigen::Ref<const Eigen::MatrixXd> targets = backward_role ? data.states() : data.next_states();
  Eigen::MatrixXd pred = predict_batch(inputs, data.actions());
  return (pred - targets).squaredNorm() / static_cast<double>(data.size());
}

std::vector<double> train_dynamics_model(VectorDynamicsModel& model, const TransitionDataset& data,
                                         bool backward_role, const OptimizerState& opt_template,
                                         int epochs, int batch_size, std::mt19937_64& rng) {
  if (data.size() == 0) throw std::invalid_argument("train: empty transition dataset");
  std::vector<double> curve;
  if (epochs == 0) return curve;

  Eigen::Ref<const Eigen::MatrixXd> inputs = backward_role ? data.next_states() : data.states();
  Eigen::Ref<const Eigen::MatrixXd> targets = backward_role ? data.states() : data.next_states();

  if (model.conditioning_ == ActionConditioning::PerActionLinear) {
    // One optimizer per submodel; mini-batches drawn within each action's data.
    std::vector<OptimizerState> opts(model.action_count_, opt_template);
    std::vector<std::vector<long>> by_action(model.action_count_);
    for (long i = 0; i < data.size(); ++i) by_action[data.actions()[i]].push_back(i);

    for (int epoch = 0; epoch < epochs; ++epoch) {
      for (int a = 0; a < model.action_count_; ++a) {
        auto& indices = by_action[a];
        if (indices.empty()) continue;
        std::shuffle(indices.begin(), indices.end(), rng);
        LinearModel& lm = model.linear_[a];
        Eigen::VectorXd params = lm.flatten();
        Eigen::VectorXd grad;
        for (std::size_t start = 0; start < indices.size(); start += batch_size) {
          const long count = std::min<long>(batch_size, indices.size() - start);
          Eigen::MatrixXd bx(inputs.rows(), count), bt(targets.rows(), count);
          for (long i = 0; i < count; ++i) {
            bx.col(i) = inputs.col(indices[start + i]);
            bt.col(i) = targets.col(indices[start + i]);
          }
          lm.gradient(bx, bt, grad);
          apply_update(opts[a], params, grad);
          lm.unflatten(params);
        }
      }
      curve.push_back(model.dataset_mse(data, backward_role));
    }
    return curve;
  }

  OptimizerState opt = opt_template;
  Eigen::MatrixXd net_inputs = Eigen::MatrixXd::Zero(model.obs_size_ + model.action_count_,
                                                     data.size());
  net_inputs.topRows(model.obs_size_) = inputs;
  for (long i = 0; i < data.size(); ++i) net_inputs(model.obs_size_ + data.actions()[i], i) = 1.0;

  std::vector<long> order(data.size());
  std::iota(order.begin(), order.end(), 0L);
  Eigen::VectorXd grad;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (long start = 0; start < data.size(); start += batch_size) {
      const long count = std::min<long>(batch_size, data.size() - start);
      Eigen::MatrixXd bx(net_inputs.rows(), count), bt(targets.rows(), count);
      for (long i = 0; i < count; ++i) {
        bx.col(i) = net_inputs.col(order[start + i]);
        bt.col(i) = targets.col(order[start + i]);
      }
      model.net_.gradient(bx, bt, grad);
      apply_update(opt, model.net_.params(), grad);
    }
    curve.push_back(model.dataset_mse(data, backward_role));
  }
  return curve;
}

std::vector<double> train_forward(VectorDynamicsModel& model, const TransitionDataset& data,
                                  const OptimizerState& opt, int epochs, int batch_size,
                                  std::mt19937_64& rng) {
  return train_dynamics_model(model, data, /*backward_role=*/false, opt, epochs, batch_size, rng);
}

std::vector<double> train_backward(VectorDynamicsModel& model, const TransitionDataset& data,
                                   const OptimizerState& opt, int epochs, int batch_size,
                                   std::mt19937_64& rng) {
  return train_dynamics_model(model, data, /*backward_role=*/true, opt, epochs, batch_size, rng);
}

Eigen::VectorXd hypothetical_state(const VectorDynamicsModel& fwd, const VectorDynamicsModel& bwd,
                                   const Eigen::VectorXd& obs, int action, int a_hyp) {
  if (action == a_hyp) return obs;
  return bwd.predict(fwd.predict(obs, action), a_hyp);
}

namespace {

std::vector<int> model_shape(const VectorDynamicsModel& model) {
  if (model.conditioning() == ActionConditioning::PerActionLinear) {
    return {model.action_count(), model.obs_size(), model.obs_size()};
  }
  return model.net().layer_sizes();
}

Eigen::VectorXd model_params(const VectorDynamicsModel& model) {
  if (model.conditioning() == ActionConditioning::OneHotConcatNet) return model.net().params();
  long total = 0;
  for (const auto& lm : model.linear_models()) total += lm.param_count();
  Eigen::VectorXd flat(total);
  long offset = 0;
  for (const auto& lm : model.linear_models()) {
    flat.segment(offset, lm.param_count()) = lm.flatten();
    offset += lm.param_count();
  }
  return flat;
}

}  // namespace

void save_dynamics_model(const VectorDynamicsModel& model, const ModelManifest& manifest,
                         const std::string& directory, const std::string& stem) {
  std::filesystem::create_directories(directory);
  const std::string params_file = stem + ".params";
  save_parameter_snapshot(directory + "/" + params_file, model_shape(model),
                          model_params(model));

  nlohmann::json doc;
  doc["environment"] = manifest.environment;
  doc["role"] = manifest.role;
  doc["conditioning"] = to_string(model.conditioning());
  doc["training_budget"] = manifest.training_budget;
  doc["action_count"] = model.action_count();
  doc["obs_size"] = model.obs_size();
  doc["params_file"] = params_file;
  if (model.conditioning() == ActionConditioning::OneHotConcatNet) {
    doc["layer_sizes"] = model.net().layer_sizes();
    std::vector<std::string> acts;
    for (Activation a : model.net().activations()) acts.push_back(to_string(a));
    doc["activations"] = acts;
  }
  std::ofstream out(directory + "/" + stem + ".json");
  if (!out) throw std::runtime_error("cannot write model manifest: " + stem);
  out << doc.dump(2) << "\n";
}

VectorDynamicsModel load_dynamics_model(const std::string& directory, const std::string& stem,
                                        ModelManifest* manifest_out) {
  std::ifstream in(directory + "/" + stem + ".json");
  if (!in) throw std::runtime_error("cannot open model manifest: " + directory + "/" + stem);
  nlohmann::json doc = nlohmann::json::parse(in);

  VectorDynamicsModel model;
  const ActionConditioning conditioning =
      conditioning_from_string(doc.at("conditioning").get<std::string>());
  const int action_count = doc.at("action_count").get<int>();
  const int obs_size = doc.at("obs_size").get<int>();
  auto [shape, params] =
      load_parameter_snapshot(directory + "/" + doc.at("params_file").get<std::string>());

  std::mt19937_64 dummy(0);
  if (conditioning == ActionConditioning::PerActionLinear) {
    model = VectorDynamicsModel::per_action_linear(action_count, obs_size, dummy);
    long offset = 0;
    for (auto& lm : model.linear_models()) {
      lm.unflatten(params.segment(offset, lm.param_count()));
      offset += lm.param_count();
    }
  } else {
    std::vector<int> sizes = doc.at("layer_sizes").get<std::vector<int>>();
    std::vector<int> hidden(sizes.begin() + 1, sizes.end() - 1);
    std::vector<Activation> acts;
    for (const auto& name : doc.at("activations").get<std::vector<std::string>>()) {
      acts.push_back(activation_from_string(name));
    }
    model = VectorDynamicsModel::one_hot_net(action_count, obs_size, hidden,
                                             acts.empty() ? Activation::Relu : acts.front(),
                                             dummy);
    model.net() = DenseNet(sizes, acts);
    model.net().params() = params;
  }
  if (manifest_out) {
    manifest_out->environment = doc.value("environment", "");
    manifest_out->role = doc.value("role", "");
    manifest_out->conditioning = to_string(conditioning);
    manifest_out->training_budget = doc.value("training_budget", 0L);
  }
  return model;
}

}  // namespace eea
