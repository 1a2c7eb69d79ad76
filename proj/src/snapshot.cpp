#include "eea/snapshot.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "eea/csv.hpp"

namespace eea {

void save_parameter_snapshot(const std::string& path, const std::vector<int>& shape,
                             const Eigen::VectorXd& values) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open snapshot for writing: " + path);
  out << "shape";
  for (int d : shape) out << " " << d;
  out << "\n";
  out << "values " << values.size() << "\n";
  for (long i = 0; i < values.size(); ++i) out << format_double(values(i)) << "\n";
  if (!out) throw std::runtime_error("write failed for snapshot: " + path);
}

std::pair<std::vector<int>, Eigen::VectorXd> load_parameter_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("snapshot truncated: " + path);
  std::istringstream header(line);
  std::string tag;
  header >> tag;
  if (tag != "shape") throw std::runtime_error("snapshot missing shape header: " + path);
  std::vector<int> shape;
  int dim;
  while (header >> dim) shape.push_back(dim);

  if (!std::getline(in, line)) throw std::runtime_error("snapshot truncated: " + path);
  std::istringstream counts(line);
  long n = -1;
  counts >> tag >> n;
  if (tag != "values" || n < 0) throw std::runtime_error("snapshot missing values header: " + path);

  Eigen::VectorXd values(n);
  for (long i = 0; i < n; ++i) {
    if (!(in >> values(i))) throw std::runtime_error("snapshot truncated: " + path);
  }
  return {shape, values};
}

}  // namespace eea
