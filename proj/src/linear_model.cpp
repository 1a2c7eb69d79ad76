#include "eea/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace eea {

Eigen::VectorXd LinearModel::flatten() const {
  Eigen::VectorXd flat(param_count());
  flat.head(weight.size()) = Eigen::Map<const Eigen::VectorXd>(weight.data(), weight.size());
  flat.tail(bias.size()) = bias;
  return flat;
}

void LinearModel::unflatten(const Eigen::VectorXd& params) {
  if (params.size() != param_count()) {
    throw std::invalid_argument("LinearModel::unflatten: length mismatch");
  }
  Eigen::Map<Eigen::VectorXd>(weight.data(), weight.size()) = params.head(weight.size());
  bias = params.tail(bias.size());
}

void LinearModel::init_uniform(std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / (input_size() + output_size()));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (long i = 0; i < weight.size(); ++i) weight.data()[i] = dist(rng);
  bias.setZero();
}

double LinearModel::gradient(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                             Eigen::VectorXd& grad_out) const {
  if (inputs.rows() != input_size() || targets.rows() != output_size() ||
      inputs.cols() != targets.cols()) {
    throw std::invalid_argument("LinearModel::gradient: shape mismatch");
  }
  const double batch = static_cast<double>(inputs.cols());
  Eigen::MatrixXd residual = predict_batch(inputs) - targets;
  const double loss = 0.5 * residual.squaredNorm() / batch;

  grad_out.resize(param_count());
  Eigen::Map<Eigen::MatrixXd> grad_w(grad_out.data(), output_size(), input_size());
  grad_w.noalias() = residual * inputs.transpose() / batch;
  grad_out.tail(bias.size()) = residual.rowwise().sum() / batch;
  return loss;
}

double fit_linear(LinearModel& model, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& targets, OptimizerState& opt, int epochs,
                  int batch_size, std::mt19937_64& rng) {
  const long n = inputs.cols();
  if (n == 0) throw std::invalid_argument("fit_linear: empty dataset");
  if (batch_size <= 0) throw std::invalid_argument("fit_linear: batch size must be positive");

  Eigen::VectorXd params = model.flatten();
  Eigen::VectorXd grad;
  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0L);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (long start = 0; start < n; start += batch_size) {
      const long count = std::min<long>(batch_size, n - start);
      Eigen::MatrixXd batch_in(inputs.rows(), count);
      Eigen::MatrixXd batch_t(targets.rows(), count);
      for (long i = 0; i < count; ++i) {
        batch_in.col(i) = inputs.col(order[start + i]);
        batch_t.col(i) = targets.col(order[start + i]);
      }
      model.gradient(batch_in, batch_t, grad);
      apply_update(opt, params, grad);
      model.unflatten(params);
    }
  }
  return mean_squared_error(model, inputs, targets);
}

double mean_squared_error(const LinearModel& model, const Eigen::MatrixXd& inputs,
                          const Eigen::MatrixXd& targets) {
  return (model.predict_batch(inputs) - targets).squaredNorm() /
         static_cast<double>(inputs.cols());
}

}  // namespace eea
