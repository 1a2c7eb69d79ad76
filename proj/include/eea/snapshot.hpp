#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace eea {

/// Text parameter snapshot: a `shape d0 d1 ...` header, a `values N` line,
/// then one full-precision value per line.
void save_parameter_snapshot(const std::string& path, const std::vector<int>& shape,
                             const Eigen::VectorXd& values);

std::pair<std::vector<int>, Eigen::VectorXd> load_parameter_snapshot(const std::string& path);

}  // namespace eea
