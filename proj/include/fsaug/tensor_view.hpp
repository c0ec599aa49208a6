#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fsaug {

// Named view over one parameter tensor's contiguous storage. Models expose
// their parameters as an ordered list of these; the optimizer and the
// checkpoint writer both iterate that list, so ordering is part of the
// contract.
struct TensorView {
  std::string name;
  double* data = nullptr;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  Eigen::Index size() const { return rows * cols; }
  Eigen::Map<Eigen::VectorXd> flat() const {
    return Eigen::Map<Eigen::VectorXd>(data, size());
  }
};

using TensorViews = std::vector<TensorView>;

}  // namespace fsaug
