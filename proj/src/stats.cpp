#include "fsaug/stats.hpp"

#include <cmath>
#include <vector>

namespace fsaug {

SigmaVector per_element_std(const NumericMatrix& contexts) {
  const auto n = contexts.rows();
  if (n < 2) {
    throw InsufficientDataError(
        "per_element_std: need at least 2 context vectors, got " +
        std::to_string(n));
  }
  const NumericVector mean = contexts.colwise().mean();
  SigmaVector sigma(contexts.cols());
  for (Eigen::Index j = 0; j < contexts.cols(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = contexts(i, j) - mean[j];
      acc += d * d;
    }
    sigma[j] = std::sqrt(acc / static_cast<double>(n));
  }
  return sigma;
}

double euclidean_distance(const NumericVector& a, const NumericVector& b) {
  require_same_size(a, b, "euclidean_distance");
  return (a - b).norm();
}

double mean_of(const std::vector<double>& values) {
  double acc = 0.0;
  for (double v : values) acc += v;
  return values.empty() ? 0.0 : acc / static_cast<double>(values.size());
}

double sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double m = mean_of(values);
  double acc = 0.0;
  for (double v : values) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

}  // namespace fsaug
