#include "eea/dense_net.hpp"

#include <cmath>
#include <stdexcept>

namespace eea {

Activation activation_from_string(const std::string& name) {
  if (name == "identity") return Activation::Identity;
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  throw std::invalid_argument("unknown activation: " + name);
}

std::string to_string(Activation activation) {
  switch (activation) {
    case Activation::Identity: return "identity";
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
  }
  return "identity";
}

namespace {

void apply_activation(Activation act, Eigen::MatrixXd& values) {
  switch (act) {
    case Activation::Identity: break;
    case Activation::Tanh: values = values.array().tanh().matrix(); break;
    case Activation::Relu: values = values.cwiseMax(0.0); break;
  }
}

// Derivative expressed through pre-activation z and post-activation a.
Eigen::MatrixXd activation_derivative(Activation act, const Eigen::MatrixXd& z,
                                      const Eigen::MatrixXd& a) {
  switch (act) {
    case Activation::Identity: return Eigen::MatrixXd::Ones(z.rows(), z.cols());
    case Activation::Tanh: return (1.0 - a.array().square()).matrix();
    case Activation::Relu: return (z.array() > 0.0).cast<double>().matrix();
  }
  return Eigen::MatrixXd::Ones(z.rows(), z.cols());
}

}  // namespace

DenseNet::DenseNet(std::vector<int> layer_sizes, std::vector<Activation> activations,
                   std::vector<SkipConnection> skips)
    : layer_sizes_(std::move(layer_sizes)),
      activations_(std::move(activations)),
      skips_(std::move(skips)) {
  if (layer_sizes_.size() < 2) {
    throw std::invalid_argument("DenseNet: need at least input and output sizes");
  }
  for (int n : layer_sizes_) {
    if (n <= 0) throw std::invalid_argument("DenseNet: layer sizes must be positive");
  }
  if (activations_.size() != layer_sizes_.size() - 1) {
    throw std::invalid_argument("DenseNet: one activation per weight layer required");
  }
  for (const auto& skip : skips_) {
    if (skip.from < 0 || skip.to <= skip.from ||
        skip.to >= static_cast<int>(layer_sizes_.size())) {
      throw std::invalid_argument("DenseNet: skip must run forward within the network");
    }
    if (layer_sizes_[skip.from] != layer_sizes_[skip.to]) {
      throw std::invalid_argument("DenseNet: skip endpoints must have equal widths");
    }
  }
  long total = 0;
  for (std::size_t l = 1; l < layer_sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += static_cast<long>(layer_sizes_[l - 1] + 1) * layer_sizes_[l];
  }
  params_ = Eigen::VectorXd::Zero(total);
}

DenseNet DenseNet::mlp(std::vector<int> layer_sizes, Activation hidden) {
  std::vector<Activation> acts(layer_sizes.size() - 1, hidden);
  acts.back() = Activation::Identity;
  return DenseNet(std::move(layer_sizes), std::move(acts));
}

DenseNet::LayerView DenseNet::layer(int l) const {
  const int in = layer_sizes_[l - 1];
  const int out = layer_sizes_[l];
  const double* base = params_.data() + offsets_[l - 1];
  return {Eigen::Map<const Eigen::MatrixXd>(base, out, in),
          Eigen::Map<const Eigen::VectorXd>(base + static_cast<long>(out) * in, out)};
}

void DenseNet::init_uniform(std::mt19937_64& rng) {
  params_.setZero();
  for (std::size_t l = 1; l < layer_sizes_.size(); ++l) {
    const int in = layer_sizes_[l - 1];
    const int out = layer_sizes_[l];
    const double bound = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    double* base = params_.data() + offsets_[l - 1];
    for (long i = 0; i < static_cast<long>(out) * in; ++i) base[i] = dist(rng);
    // biases stay zero
  }
}

Eigen::VectorXd DenseNet::forward(const Eigen::VectorXd& input) const {
  return forward_batch(input).col(0);
}

Eigen::MatrixXd DenseNet::forward_batch(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != input_size()) {
    throw std::invalid_argument("DenseNet::forward: input length mismatch");
  }
  const int layers = static_cast<int>(layer_sizes_.size()) - 1;
  std::vector<Eigen::MatrixXd> post(layers + 1);
  post[0] = inputs;
  for (int l = 1; l <= layers; ++l) {
    auto view = layer(l);
    Eigen::MatrixXd z = view.weight * post[l - 1];
    z.colwise() += view.bias;
    for (const auto& skip : skips_) {
      if (skip.to == l) z += post[skip.from];
    }
    apply_activation(activations_[l - 1], z);
    post[l] = std::move(z);
  }
  return post[layers];
}

double DenseNet::gradient(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                          Eigen::VectorXd& grad_out) const {
  if (inputs.rows() != input_size() || targets.rows() != output_size() ||
      inputs.cols() != targets.cols()) {
    throw std::invalid_argument("DenseNet::gradient: shape mismatch");
  }
  const int layers = static_cast<int>(layer_sizes_.size()) - 1;
  const long batch = inputs.cols();

  std::vector<Eigen::MatrixXd> pre(layers + 1), post(layers + 1);
  post[0] = inputs;
  for (int l = 1; l <= layers; ++l) {
    auto view = layer(l);
    pre[l] = view.weight * post[l - 1];
    pre[l].colwise() += view.bias;
    for (const auto& skip : skips_) {
      if (skip.to == l) pre[l] += post[skip.from];
    }
    post[l] = pre[l];
    apply_activation(activations_[l - 1], post[l]);
  }

  const Eigen::MatrixXd residual = post[layers] - targets;
  const double loss = 0.5 * residual.squaredNorm() / static_cast<double>(batch);

  grad_out = Eigen::VectorXd::Zero(params_.size());
  // d(loss)/d(post-activation) per layer, accumulated from above and skips.
  std::vector<Eigen::MatrixXd> d_post(layers + 1);
  d_post[layers] = residual / static_cast<double>(batch);

  for (int l = layers; l >= 1; --l) {
    Eigen::MatrixXd delta =
        d_post[l].cwiseProduct(activation_derivative(activations_[l - 1], pre[l], post[l]));
    const int in = layer_sizes_[l - 1];
    const int out = layer_sizes_[l];
    double* base = grad_out.data() + offsets_[l - 1];
    Eigen::Map<Eigen::MatrixXd> grad_w(base, out, in);
    Eigen::Map<Eigen::VectorXd> grad_b(base + static_cast<long>(out) * in, out);
    grad_w.noalias() = delta * post[l - 1].transpose();
    grad_b = delta.rowwise().sum();

    auto view = layer(l);
    Eigen::MatrixXd below = view.weight.transpose() * delta;
    if (d_post[l - 1].size() == 0) {
      d_post[l - 1] = std::move(below);
    } else {
      d_post[l - 1] += below;
    }
    for (const auto& skip : skips_) {
      if (skip.to != l) continue;
      if (d_post[skip.from].size() == 0) {
        d_post[skip.from] = delta;
      } else {
        d_post[skip.from] += delta;
      }
    }
  }
  return loss;
}

}  // namespace eea
