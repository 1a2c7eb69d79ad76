#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace eea {

/// Observation emitted by an environment. Discrete environments fill
/// `index`; vector environments fill `vec`; the maze can fill both.
struct Observation {
  int index = -1;
  Eigen::VectorXd vec;
};

enum class ObservationKind { Discrete, Vector };

struct ObservationSpec {
  ObservationKind kind = ObservationKind::Discrete;
  int size = 0;  // vector length; discrete cardinality for Discrete
};

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool done = false;
};

/// Single-owner episodic environment. reset with equal seeds yields
/// identical trajectories under identical action sequences; stepping a
/// finished episode is an error.
class Env {
 public:
  virtual ~Env() = default;
  virtual int action_count() const = 0;
  virtual ObservationSpec observation_spec() const = 0;
  virtual Observation reset(std::uint64_t seed) = 0;
  virtual StepResult step(int action) = 0;
};

}  // namespace eea
