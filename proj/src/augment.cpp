#include "fsaug/augment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "fsaug/log.hpp"

namespace fsaug {

namespace {

using DistId = std::pair<double, int>;  // (squared distance, id)

void check_query(const NumericMatrix& contexts, const std::vector<int>& labels,
                 int query_index, int k) {
  if (static_cast<std::size_t>(contexts.rows()) != labels.size())
    throw DimensionError("knn_in_class: contexts/labels size mismatch");
  if (query_index < 0 || query_index >= contexts.rows())
    throw ParameterError("knn_in_class: query index out of range");
  if (k < 1) throw ParameterError("knn_in_class: k must be >= 1");
}

}  // namespace

std::vector<int> knn_in_class(const NumericMatrix& contexts,
                              const std::vector<int>& labels, int query_index,
                              int k) {
  check_query(contexts, labels, query_index, k);
  const int label = labels[query_index];
  const auto query = contexts.row(query_index);

  std::vector<DistId> candidates;
  for (Eigen::Index i = 0; i < contexts.rows(); ++i) {
    if (static_cast<int>(i) == query_index || labels[i] != label) continue;
    candidates.emplace_back((contexts.row(i) - query).squaredNorm(),
                            static_cast<int>(i));
  }
  if (candidates.empty())
    throw InsufficientDataError("knn_in_class: query's class has no other members");

  const std::size_t keep = std::min<std::size_t>(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + keep,
                    candidates.end());
  std::vector<int> out(keep);
  for (std::size_t i = 0; i < keep; ++i) out[i] = candidates[i].second;
  return out;
}

PrunedKnnIndex::PrunedKnnIndex(NumericMatrix points, std::vector<int> ids)
    : points_(std::move(points)), ids_(std::move(ids)) {
  const Eigen::Index n = points_.rows();
  if (static_cast<std::size_t>(n) != ids_.size())
    throw DimensionError("PrunedKnnIndex: points/ids size mismatch");
  if (n == 0) throw InsufficientDataError("PrunedKnnIndex: no points");

  // Coarse centroids: strided init, a few Lloyd rounds. Quality only affects
  // pruning rate, never correctness.
  const int cells = std::max<int>(1, static_cast<int>(std::sqrt(static_cast<double>(n) / 2.0)));
  centroids_.resize(cells, points_.cols());
  for (int c = 0; c < cells; ++c)
    centroids_.row(c) = points_.row(static_cast<Eigen::Index>(c) * n / cells);

  std::vector<int> assign(n, 0);
  for (int round = 0; round < 5; ++round) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (int c = 0; c < cells; ++c) {
        const double d = (points_.row(i) - centroids_.row(c)).squaredNorm();
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      assign[i] = best_c;
    }
    NumericMatrix sums = NumericMatrix::Zero(cells, points_.cols());
    std::vector<int> counts(cells, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[i]) += points_.row(i);
      counts[assign[i]] += 1;
    }
    for (int c = 0; c < cells; ++c)
      if (counts[c] > 0) centroids_.row(c) = sums.row(c) / counts[c];
  }

  cell_members_.assign(cells, {});
  cell_radius_.assign(cells, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    cell_members_[assign[i]].push_back(static_cast<int>(i));
    const double d = (points_.row(i) - centroids_.row(assign[i])).norm();
    cell_radius_[assign[i]] = std::max(cell_radius_[assign[i]], d);
  }
}

std::vector<int> PrunedKnnIndex::query(const NumericVector& query, int k,
                                       int exclude_id) const {
  if (query.size() != points_.cols())
    throw DimensionError("PrunedKnnIndex::query: dimension mismatch");
  if (k < 1) throw ParameterError("PrunedKnnIndex::query: k must be >= 1");

  const int cells = static_cast<int>(cell_members_.size());
  std::vector<std::pair<double, int>> order(cells);  // (centroid distance, cell)
  for (int c = 0; c < cells; ++c)
    order[c] = {(centroids_.row(c).transpose() - query).norm(), c};
  std::sort(order.begin(), order.end());

  // max-heap over (squared distance, id); worst candidate on top
  std::priority_queue<DistId> best;
  for (const auto& [centroid_dist, c] : order) {
    if (static_cast<int>(best.size()) >= k) {
      const double lower = std::max(0.0, centroid_dist - cell_radius_[c]);
      if (lower * lower > best.top().first) continue;  // ties never pruned
    }
    for (int row : cell_members_[c]) {
      if (ids_[row] == exclude_id) continue;
      const DistId cand{(points_.row(row).transpose() - query).squaredNorm(),
                        ids_[row]};
      if (static_cast<int>(best.size()) < k) {
        best.push(cand);
      } else if (cand < best.top()) {
        best.pop();
        best.push(cand);
      }
    }
  }

  std::vector<DistId> sorted;
  sorted.reserve(best.size());
  while (!best.empty()) {
    sorted.push_back(best.top());
    best.pop();
  }
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> out;
  out.reserve(sorted.size());
  for (const auto& [d2, id] : sorted) out.push_back(id);
  return out;
}

std::vector<int> PrunedKnnIndex::brute_query(const NumericVector& query, int k,
                                             int exclude_id) const {
  std::vector<DistId> all;
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    if (ids_[i] == exclude_id) continue;
    all.emplace_back((points_.row(i).transpose() - query).squaredNorm(), ids_[i]);
  }
  std::sort(all.begin(), all.end());
  std::vector<int> out;
  for (std::size_t i = 0; i < all.size() && i < static_cast<std::size_t>(k); ++i)
    out.push_back(all[i].second);
  return out;
}

bool PrunedKnnIndex::self_check(int num_queries, RandomStream& stream) const {
  for (int q = 0; q < num_queries; ++q) {
    const int row = static_cast<int>(stream.uniform_index(points_.rows()));
    const NumericVector query = points_.row(row).transpose();
    if (this->query(query, 10, ids_[row]) != brute_query(query, 10, ids_[row]))
      return false;
  }
  return true;
}

ContextVector add_noise(const ContextVector& c, const SigmaVector& sigma,
                        double gamma, RandomStream& stream) {
  require_same_size(c, sigma, "add_noise");
  if (gamma < 0.0) throw ParameterError("add_noise: gamma must be >= 0");
  ContextVector out(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i)
    out[i] = c[i] + gamma * (sigma[i] * stream.normal());
  return out;
}

ContextVector affine_combine(const ContextVector& c_j, const ContextVector& c_k,
                             double t) {
  require_same_size(c_j, c_k, "affine_combine");
  return (1.0 - t) * c_j + t * c_k;
}

ContextVector interpolate(const ContextVector& c_j, const ContextVector& c_k,
                          double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw ParameterError("interpolate: lambda must be in [0, 1]");
  return affine_combine(c_j, c_k, lambda);
}

ContextVector extrapolate(const ContextVector& c_j, const ContextVector& c_k,
                          double lambda) {
  if (lambda < 0.0) throw ParameterError("extrapolate: lambda must be >= 0");
  return affine_combine(c_j, c_k, -lambda);
}

namespace {

constexpr std::uint64_t kPerSampleTag = 0x41554753414d50ULL;

std::vector<int> pick_random_in_class(const std::vector<int>& class_members,
                                      int query_index, int k,
                                      RandomStream& stream) {
  std::vector<int> pool;
  pool.reserve(class_members.size());
  for (int idx : class_members)
    if (idx != query_index) pool.push_back(idx);
  stream.shuffle(pool);
  if (static_cast<int>(pool.size()) > k) pool.resize(k);
  return pool;
}

}  // namespace

std::vector<SyntheticContext> augment_dataset(
    const NumericMatrix& contexts, const std::vector<int>& labels,
    const std::vector<int>& lengths, const AugmentConfig& config,
    RandomStream& stream, std::vector<std::string>* warnings) {
  const Eigen::Index n = contexts.rows();
  if (static_cast<std::size_t>(n) != labels.size() ||
      static_cast<std::size_t>(n) != lengths.size())
    throw DimensionError("augment_dataset: contexts/labels/lengths misaligned");
  if (config.k < 1) throw ParameterError("augment_dataset: k must be >= 1");

  const auto warn = [&](const std::string& msg) {
    if (warnings != nullptr)
      warnings->push_back(msg);
    else
      log_warning(msg);
  };

  std::vector<SyntheticContext> out;

  if (config.op == AugmentOperator::kNoise) {
    const SigmaVector sigma = per_element_std(contexts);
    for (Eigen::Index i = 0; i < n; ++i) {
      RandomStream sample_stream =
          stream.split(kPerSampleTag + static_cast<std::uint64_t>(i));
      SyntheticContext s;
      s.values = add_noise(contexts.row(i).transpose(), sigma, config.gamma,
                           sample_stream);
      s.label = labels[i];
      s.source_j = static_cast<int>(i);
      s.target_length = lengths[i];
      out.push_back(std::move(s));
    }
    return out;
  }

  std::map<int, std::vector<int>> classes;
  for (Eigen::Index i = 0; i < n; ++i)
    classes[labels[i]].push_back(static_cast<int>(i));

  // One index per class when the accelerated path is on; each index must
  // agree with brute force on a sample of queries before it is trusted.
  std::map<int, PrunedKnnIndex> indexes;
  if (config.accelerated_knn && config.policy == NeighborPolicy::kInClassNearest) {
    for (const auto& [label, members] : classes) {
      if (members.size() < 2) continue;
      NumericMatrix pts(static_cast<Eigen::Index>(members.size()), contexts.cols());
      for (std::size_t r = 0; r < members.size(); ++r)
        pts.row(r) = contexts.row(members[r]);
      indexes.emplace(label, PrunedKnnIndex(std::move(pts), members));
      RandomStream check_stream =
          stream.split(0x434845434bULL ^ static_cast<std::uint64_t>(
                                             static_cast<std::int64_t>(label)));
      if (!indexes.at(label).self_check(8, check_stream))
        throw std::logic_error(
            "augment_dataset: accelerated knn failed the brute-force check");
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& members = classes[labels[i]];
    if (members.size() < 2) {
      warn("augment_dataset: skipping sample " + std::to_string(i) +
           " (class " + std::to_string(labels[i]) + " has one member)");
      continue;
    }
    RandomStream sample_stream =
        stream.split(kPerSampleTag + static_cast<std::uint64_t>(i));

    std::vector<int> neighbors;
    if (config.policy == NeighborPolicy::kInClassRandom) {
      neighbors = pick_random_in_class(members, static_cast<int>(i), config.k,
                                       sample_stream);
    } else if (config.accelerated_knn) {
      neighbors = indexes.at(labels[i]).query(contexts.row(i).transpose(),
                                              config.k, static_cast<int>(i));
    } else {
      neighbors = knn_in_class(contexts, labels, static_cast<int>(i), config.k);
    }

    for (int nb : neighbors) {
      const double lambda =
          config.random_lambda ? sample_stream.uniform() : config.lambda;
      SyntheticContext s;
      const ContextVector c_j = contexts.row(i).transpose();
      const ContextVector c_k = contexts.row(nb).transpose();
      if (config.op == AugmentOperator::kInterpolate) {
        s.values = interpolate(c_j, c_k, lambda);
        s.target_length = (lengths[i] + lengths[nb]) / 2;  // floor of the mean
      } else {
        s.values = extrapolate(c_j, c_k, lambda);
        s.target_length = lengths[i];
      }
      s.label = labels[i];
      s.source_j = static_cast<int>(i);
      s.source_k = nb;
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace fsaug
