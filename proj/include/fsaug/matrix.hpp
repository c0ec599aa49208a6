#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "fsaug/errors.hpp"

namespace fsaug {

// Dense double-precision storage, row-major so that data() matches the
// row-major layout of the checkpoint and CSV formats.
using NumericMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using NumericVector = Eigen::VectorXd;

// A context vector is the encoder's top-layer hidden state at the final
// time step; all augmentation operators act on these.
using ContextVector = NumericVector;

inline void require_same_size(const NumericVector& a, const NumericVector& b,
                              const char* where) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(where) + ": length mismatch " +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
}

inline void require_same_shape(const NumericMatrix& a, const NumericMatrix& b,
                               const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(where) + ": shape mismatch " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

inline bool all_finite(const NumericMatrix& m) {
  return m.allFinite();
}

}  // namespace fsaug
