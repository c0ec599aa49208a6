#pragma once

#include <string>
#include <vector>

#include "fsaug/matrix.hpp"
#include "fsaug/random.hpp"
#include "fsaug/stats.hpp"

namespace fsaug {

enum class AugmentOperator { kNoise, kInterpolate, kExtrapolate };
enum class NeighborPolicy { kInClassNearest, kInClassRandom };

struct AugmentConfig {
  AugmentOperator op = AugmentOperator::kExtrapolate;
  double lambda = 0.5;
  double gamma = 0.5;
  int k = 10;
  NeighborPolicy policy = NeighborPolicy::kInClassNearest;
  bool random_lambda = false;    // draw lambda ~ U[0,1) per synthetic
  bool accelerated_knn = false;  // cell-pruned exact search instead of brute force
};

// A context vector synthesized from one or two source samples.
struct SyntheticContext {
  ContextVector values;
  int label = 0;
  int source_j = -1;
  int source_k = -1;  // -1 for the noise operator
  int target_length = 1;
};

// Indices of the k nearest same-class neighbors of contexts.row(query_index),
// by Euclidean distance, excluding the query itself, ties broken by ascending
// index. Returns all class members when the class has fewer than k others;
// throws InsufficientDataError when it has none.
std::vector<int> knn_in_class(const NumericMatrix& contexts,
                              const std::vector<int>& labels, int query_index,
                              int k);

// Exact nearest-neighbor search accelerated by a coarse quantization
// pre-filter: points are grouped into cells around centroids, and whole
// cells are skipped when the triangle-inequality lower bound
// (dist(q, centroid) - radius) already exceeds the current k-th best.
// Results are identical to brute force, including index tie-breaks.
class PrunedKnnIndex {
 public:
  // rows of `points` are the searchable vectors; `ids` are the indices to
  // report (and to break ties with), one per row, strictly increasing.
  PrunedKnnIndex(NumericMatrix points, std::vector<int> ids);

  // k nearest rows to `query`, excluding the row whose id is `exclude_id`
  // (-1 to exclude nothing). Returns ids sorted by (distance, id).
  std::vector<int> query(const NumericVector& query, int k,
                         int exclude_id = -1) const;

  // Compares a few random queries against an internal brute-force pass.
  // Returns false on any mismatch.
  bool self_check(int num_queries, RandomStream& stream) const;

 private:
  NumericMatrix points_;
  std::vector<int> ids_;
  NumericMatrix centroids_;
  std::vector<std::vector<int>> cell_members_;  // row indices per cell
  std::vector<double> cell_radius_;

  std::vector<int> brute_query(const NumericVector& query, int k,
                               int exclude_id) const;
};

// c'_i = c_i + gamma * X_i with X_i ~ N(0, sigma_i^2). gamma = 0 or a zero
// sigma element leaves the corresponding value exactly unchanged.
ContextVector add_noise(const ContextVector& c, const SigmaVector& sigma,
                        double gamma, RandomStream& stream);

// (1 - t) * c_j + t * c_k without range checks. interpolate and extrapolate
// are both thin wrappers so the -lambda duality between them holds
// element-wise exactly.
ContextVector affine_combine(const ContextVector& c_j, const ContextVector& c_k,
                             double t);

// Toward the neighbor: lambda in [0, 1], 0 -> c_j, 1 -> c_k.
ContextVector interpolate(const ContextVector& c_j, const ContextVector& c_k,
                          double lambda);

// Away from the neighbor: lambda >= 0, 0 -> c_j.
ContextVector extrapolate(const ContextVector& c_j, const ContextVector& c_k,
                          double lambda);

// Expands a labeled context set. Neighbor operators emit one synthetic per
// (sample, selected neighbor) pair; the noise operator emits exactly one
// synthetic per sample. Target lengths: interpolation takes the floor of the
// mean of the two source lengths, noise and extrapolation keep the length of
// the c_j source. Singleton classes are skipped with a warning under the
// neighbor operators.
std::vector<SyntheticContext> augment_dataset(
    const NumericMatrix& contexts, const std::vector<int>& labels,
    const std::vector<int>& lengths, const AugmentConfig& config,
    RandomStream& stream, std::vector<std::string>* warnings = nullptr);

}  // namespace fsaug
