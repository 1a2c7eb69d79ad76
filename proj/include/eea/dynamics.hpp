#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "eea/dense_net.hpp"
#include "eea/homomorphism.hpp"
#include "eea/linear_model.hpp"
#include "eea/mdp.hpp"
#include "eea/optimizer.hpp"

namespace eea {

/// Deterministic successor of (s, a); nullopt when the row is not a point
/// mass.
std::optional<int> exact_forward_lookup(const TabularMDP& mdp, int s, int a);

/// Predecessor s with transition(s, a) = next, preferring a predecessor
/// distinct from `next` when a blocked self-transition also qualifies.
/// By default self-transitions do not qualify at all, which matches the
/// geometric reading of reachability near borders; pass
/// `allow_self_predecessor` to accept the self-loop when it is the only
/// candidate. Throws when two distinct predecessors exist (non-invertible
/// dynamics).
std::optional<int> exact_backward_lookup(const TabularMDP& mdp, int next, int a,
                                         bool allow_self_predecessor = false);

ExactForwardFn make_exact_forward(const TabularMDP& mdp);
ExactBackwardFn make_exact_backward(const TabularMDP& mdp, bool allow_self_predecessor = false);

/// s_hyp = bwd(fwd(s, a), a_hyp); the a = a_hyp branch is the identity and
/// queries no model. Absence propagates.
std::optional<int> hypothetical_state(const ExactForwardFn& fwd, const ExactBackwardFn& bwd,
                                      int s, int a, int a_hyp);

/// Experience triples (s_t, a_t, s_{t+1}) with homogeneous shapes; columns
/// of the matrix views are samples. Appends are amortized O(dim).
class TransitionDataset {
 public:
  long size() const { return static_cast<long>(actions_.size()); }
  void append(const Eigen::VectorXd& state, int action, const Eigen::VectorXd& next_state);

  Eigen::Ref<const Eigen::MatrixXd> states() const { return states_.leftCols(size()); }
  Eigen::Ref<const Eigen::MatrixXd> next_states() const { return next_states_.leftCols(size()); }
  const std::vector<int>& actions() const { return actions_; }

 private:
  Eigen::MatrixXd states_;
  Eigen::MatrixXd next_states_;
  std::vector<int> actions_;
};

enum class ActionConditioning { PerActionLinear, OneHotConcatNet };

ActionConditioning conditioning_from_string(const std::string& name);
std::string to_string(ActionConditioning conditioning);

/// One-step transition predictor over vector observations; used in both the
/// forward (s, a) -> s' and backward (s', a) -> s roles. Either one linear
/// model per action or a single network taking the observation concatenated
/// with a one-hot action.
class VectorDynamicsModel {
 public:
  VectorDynamicsModel() = default;

  static VectorDynamicsModel per_action_linear(int action_count, int obs_size,
                                               std::mt19937_64& rng);
  static VectorDynamicsModel one_hot_net(int action_count, int obs_size,
                                         const std::vector<int>& hidden_sizes,
                                         Activation hidden_activation, std::mt19937_64& rng);

  ActionConditioning conditioning() const { return conditioning_; }
  int action_count() const { return action_count_; }
  int obs_size() const { return obs_size_; }

  Eigen::VectorXd predict(const Eigen::VectorXd& obs, int action) const;
  /// Columns are samples; one action per column.
  Eigen::MatrixXd predict_batch(Eigen::Ref<const Eigen::MatrixXd> obs,
                                const std::vector<int>& actions) const;

  /// Mean squared error over a dataset in the given role.
  double dataset_mse(const TransitionDataset& data, bool backward_role) const;

  std::vector<LinearModel>& linear_models() { return linear_; }
  const std::vector<LinearModel>& linear_models() const { return linear_; }
  DenseNet& net() { return net_; }
  const DenseNet& net() const { return net_; }

  friend std::vector<double> train_dynamics_model(VectorDynamicsModel&, const TransitionDataset&,
                                                  bool, const OptimizerState&, int, int,
                                                  std::mt19937_64&);

 private:
  ActionConditioning conditioning_ = ActionConditioning::PerActionLinear;
  int action_count_ = 0;
  int obs_size_ = 0;
  std::vector<LinearModel> linear_;
  DenseNet net_;
};

/// Trains one-step forward prediction (s_t, a_t) -> s_{t+1} by seeded
/// mini-batch gradient steps. Returns the per-epoch dataset MSE curve;
/// zero epochs leave the model unchanged and return an empty curve.
std::vector<double> train_forward(VectorDynamicsModel& model, const TransitionDataset& data,
                                  const OptimizerState& opt, int epochs, int batch_size,
                                  std::mt19937_64& rng);

/// Mirror of train_forward with inputs (s_{t+1}, a_t) and target s_t.
std::vector<double> train_backward(VectorDynamicsModel& model, const TransitionDataset& data,
                                   const OptimizerState& opt, int epochs, int batch_size,
                                   std::mt19937_64& rng);

/// Learned-model hypothetical state; never absent (predictions may be
/// hallucinated where no true predecessor exists).
Eigen::VectorXd hypothetical_state(const VectorDynamicsModel& fwd, const VectorDynamicsModel& bwd,
                                   const Eigen::VectorXd& obs, int action, int a_hyp);

/// Names the snapshot on disk: which environment, which role (forward or
/// backward), how actions are conditioned, and the training budget.
struct ModelManifest {
  std::string environment;
  std::string role;  // "forward" | "backward"
  std::string conditioning;
  long training_budget = 0;
};

void save_dynamics_model(const VectorDynamicsModel& model, const ModelManifest& manifest,
                         const std::string& directory, const std::string& stem);
VectorDynamicsModel load_dynamics_model(const std::string& directory, const std::string& stem,
                                        ModelManifest* manifest_out = nullptr);

}  // namespace eea
