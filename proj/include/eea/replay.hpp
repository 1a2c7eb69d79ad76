#pragma once

#include <Eigen/Dense>
#include <random>
#include <stdexcept>
#include <vector>

namespace eea {

struct Transition {
  Eigen::VectorXd obs;
  int action = 0;
  double reward = 0.0;
  Eigen::VectorXd next_obs;
  bool done = false;
};

/// Ring buffer with uniform sampling (with replacement) over its current
/// contents.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(long capacity) : capacity_(capacity) {
    if (capacity <= 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  }

  long capacity() const { return capacity_; }
  long size() const { return static_cast<long>(data_.size()); }

  void push(Transition transition) {
    if (size() < capacity_) {
      data_.push_back(std::move(transition));
    } else {
      data_[next_] = std::move(transition);
      next_ = (next_ + 1) % capacity_;
    }
  }

  const Transition& at(long i) const { return data_[i]; }

  std::vector<long> sample_indices(int batch_size, std::mt19937_64& rng) const {
    if (size() == 0) throw std::logic_error("ReplayBuffer: sampling from empty buffer");
    std::uniform_int_distribution<long> pick(0, size() - 1);
    std::vector<long> indices(batch_size);
    for (auto& i : indices) i = pick(rng);
    return indices;
  }

  std::vector<Transition> sample(int batch_size, std::mt19937_64& rng) const {
    std::vector<Transition> batch;
    batch.reserve(batch_size);
    for (long i : sample_indices(batch_size, rng)) batch.push_back(data_[i]);
    return batch;
  }

  /// Applies `fn` to every stored transition (oldest first is not
  /// guaranteed; storage order).
  template <typename Fn>
  void for_each(Fn&& fn) {
    for (auto& t : data_) fn(t);
  }

 private:
  long capacity_;
  std::vector<Transition> data_;
  long next_ = 0;
};

}  // namespace eea
