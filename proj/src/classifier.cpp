#include "fsaug/classifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <thread>

#include "fsaug/stats.hpp"

namespace fsaug {

namespace {

NumericMatrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double p,
                           RandomStream& stream) {
  const double inv = 1.0 / (1.0 - p);
  NumericMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = stream.uniform() >= p ? inv : 0.0;
  return m;
}

NumericMatrix relu(const NumericMatrix& x) {
  return x.cwiseMax(0.0);
}

// row-wise softmax, max-shifted
NumericMatrix softmax_rows(const NumericMatrix& logits) {
  NumericMatrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    Eigen::RowVectorXd e = (logits.row(i).array() - mx).exp();
    out.row(i) = e / e.sum();
  }
  return out;
}

}  // namespace

MlpModel MlpModel::zeros(int input, int hidden, int classes) {
  MlpModel m;
  m.w1 = NumericMatrix::Zero(input, hidden);
  m.w2 = NumericMatrix::Zero(hidden, hidden);
  m.w3 = NumericMatrix::Zero(hidden, classes);
  m.b1 = NumericVector::Zero(hidden);
  m.b2 = NumericVector::Zero(hidden);
  m.b3 = NumericVector::Zero(classes);
  return m;
}

MlpModel MlpModel::init(int input, int hidden, int classes,
                        RandomStream& stream) {
  MlpModel m = zeros(input, hidden, classes);
  const auto fill = [&stream](NumericMatrix& w) {
    const double scale = std::sqrt(2.0 / static_cast<double>(w.rows()));
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        w(i, j) = scale * stream.normal();
  };
  fill(m.w1);
  fill(m.w2);
  fill(m.w3);
  return m;
}

MlpGrads MlpGrads::zeros_like(const MlpModel& model) {
  MlpGrads g;
  g.w1 = NumericMatrix::Zero(model.w1.rows(), model.w1.cols());
  g.w2 = NumericMatrix::Zero(model.w2.rows(), model.w2.cols());
  g.w3 = NumericMatrix::Zero(model.w3.rows(), model.w3.cols());
  g.b1 = NumericVector::Zero(model.b1.size());
  g.b2 = NumericVector::Zero(model.b2.size());
  g.b3 = NumericVector::Zero(model.b3.size());
  return g;
}

namespace {

template <typename T>
TensorViews mlp_views(T& t) {
  return TensorViews{
      {"w1", t.w1.data(), t.w1.rows(), t.w1.cols()},
      {"b1", t.b1.data(), t.b1.size(), 1},
      {"w2", t.w2.data(), t.w2.rows(), t.w2.cols()},
      {"b2", t.b2.data(), t.b2.size(), 1},
      {"w3", t.w3.data(), t.w3.rows(), t.w3.cols()},
      {"b3", t.b3.data(), t.b3.size(), 1},
  };
}

}  // namespace

TensorViews parameter_views(MlpModel& model) { return mlp_views(model); }
TensorViews parameter_views(MlpGrads& grads) { return mlp_views(grads); }

NumericVector mlp_forward(const MlpModel& model, const NumericVector& x,
                          bool train_mode, RandomStream* stream) {
  if (x.size() != model.input_size())
    throw DimensionError("mlp_forward: input size mismatch");
  if (train_mode && stream == nullptr)
    throw ParameterError("mlp_forward: train mode requires a random stream");
  const bool dropout = train_mode && model.dropout_prob > 0.0;

  NumericMatrix h(1, x.size());
  h.row(0) = x.transpose();
  h = relu((h * model.w1).rowwise() + model.b1.transpose());
  if (dropout) h = h.cwiseProduct(dropout_mask(1, h.cols(), model.dropout_prob, *stream));
  h = relu((h * model.w2).rowwise() + model.b2.transpose());
  if (dropout) h = h.cwiseProduct(dropout_mask(1, h.cols(), model.dropout_prob, *stream));
  NumericMatrix logits = (h * model.w3).rowwise() + model.b3.transpose();
  return softmax_rows(logits).row(0).transpose();
}

double mlp_loss_and_grads(const MlpModel& model, const NumericMatrix& features,
                          const std::vector<int>& labels,
                          const std::vector<int>& rows, RandomStream* stream,
                          bool train_mode, MlpGrads& grads) {
  const int batch = static_cast<int>(rows.size());
  if (batch == 0) throw InsufficientDataError("mlp_loss_and_grads: empty batch");
  const bool dropout = train_mode && model.dropout_prob > 0.0;
  if (dropout && stream == nullptr)
    throw ParameterError("mlp_loss_and_grads: train mode requires a stream");

  NumericMatrix x(batch, features.cols());
  for (int b = 0; b < batch; ++b) x.row(b) = features.row(rows[b]);

  NumericMatrix pre1 = (x * model.w1).rowwise() + model.b1.transpose();
  NumericMatrix h1 = relu(pre1);
  NumericMatrix mask1, mask2;
  NumericMatrix h1d = h1;
  if (dropout) {
    mask1 = dropout_mask(batch, h1.cols(), model.dropout_prob, *stream);
    h1d = h1.cwiseProduct(mask1);
  }
  NumericMatrix pre2 = (h1d * model.w2).rowwise() + model.b2.transpose();
  NumericMatrix h2 = relu(pre2);
  NumericMatrix h2d = h2;
  if (dropout) {
    mask2 = dropout_mask(batch, h2.cols(), model.dropout_prob, *stream);
    h2d = h2.cwiseProduct(mask2);
  }
  NumericMatrix logits = (h2d * model.w3).rowwise() + model.b3.transpose();
  NumericMatrix probs = softmax_rows(logits);

  double loss = 0.0;
  NumericMatrix d_logits = probs;
  for (int b = 0; b < batch; ++b) {
    const int y = labels[rows[b]];
    loss -= std::log(std::max(probs(b, y), 1e-300));
    d_logits(b, y) -= 1.0;
  }
  loss /= batch;
  d_logits /= static_cast<double>(batch);

  grads.w3.noalias() += h2d.transpose() * d_logits;
  grads.b3 += d_logits.colwise().sum().transpose();
  NumericMatrix d_h2d = d_logits * model.w3.transpose();
  if (dropout) d_h2d = d_h2d.cwiseProduct(mask2);
  NumericMatrix d_pre2 =
      d_h2d.cwiseProduct((pre2.array() > 0.0).cast<double>().matrix());
  grads.w2.noalias() += h1d.transpose() * d_pre2;
  grads.b2 += d_pre2.colwise().sum().transpose();
  NumericMatrix d_h1d = d_pre2 * model.w2.transpose();
  if (dropout) d_h1d = d_h1d.cwiseProduct(mask1);
  NumericMatrix d_pre1 =
      d_h1d.cwiseProduct((pre1.array() > 0.0).cast<double>().matrix());
  grads.w1.noalias() += x.transpose() * d_pre1;
  grads.b1 += d_pre1.colwise().sum().transpose();
  return loss;
}

ClassifierTrainResult train_classifier(MlpModel& model,
                                       const NumericMatrix& features,
                                       const std::vector<int>& labels,
                                       const UpdateBudget& budget,
                                       const ClassifierTrainConfig& config,
                                       RandomStream& stream) {
  if (features.rows() == 0)
    throw InsufficientDataError("train_classifier: empty feature set");
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw DimensionError("train_classifier: features/labels misaligned");
  if (budget.total_weight_updates < 1)
    throw ParameterError("train_classifier: budget must be > 0");
  std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2)
    throw InsufficientDataError("train_classifier: need at least 2 classes");
  for (int y : labels)
    if (y < 0 || y >= model.num_classes())
      throw ParameterError("train_classifier: label out of range");

  RandomStream mask_stream = stream.split(0x4d41534bULL);
  AdamState adam(config.learning_rate);
  const TensorViews param_views = parameter_views(model);

  ClassifierTrainResult result;
  std::vector<int> indices(features.rows());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<int>(i);

  long updates = 0;
  int epoch = 0;
  while (updates < budget.total_weight_updates) {
    epoch += 1;
    RandomStream epoch_stream = stream.split(0x45504fULL + static_cast<std::uint64_t>(epoch));
    epoch_stream.shuffle(indices);

    double loss_acc = 0.0;
    long batches = 0;
    for (std::size_t start = 0; start < indices.size();
         start += config.batch_size) {
      const std::size_t end =
          std::min(indices.size(), start + config.batch_size);
      std::vector<int> rows(indices.begin() + start, indices.begin() + end);

      MlpGrads grads = MlpGrads::zeros_like(model);
      loss_acc += mlp_loss_and_grads(model, features, labels, rows,
                                     &mask_stream, true, grads);
      adam_step(param_views, parameter_views(grads), adam);
      batches += 1;
      updates += 1;
      if (updates >= budget.total_weight_updates) break;
    }
    result.epoch_loss.push_back(loss_acc / static_cast<double>(batches));
  }
  result.updates_performed = updates;
  return result;
}

double evaluate(const MlpModel& model, const NumericMatrix& features,
                const std::vector<int>& labels) {
  if (features.rows() == 0)
    throw InsufficientDataError("evaluate: empty test set");
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw DimensionError("evaluate: features/labels misaligned");

  long wrong = 0;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const NumericVector probs =
        mlp_forward(model, features.row(i).transpose(), false, nullptr);
    int best = 0;
    for (int c = 1; c < probs.size(); ++c)
      if (probs[c] > probs[best]) best = c;  // ties keep the lowest index
    if (best != labels[i]) wrong += 1;
  }
  return 100.0 * static_cast<double>(wrong) /
         static_cast<double>(features.rows());
}

EvalResult repeated_eval(const std::vector<std::uint64_t>& seeds,
                         const std::function<double(int, std::uint64_t)>& run_fn,
                         int threads) {
  if (seeds.size() < 2)
    throw InsufficientDataError("repeated_eval: need at least 2 runs");

  EvalResult result;
  result.runs = static_cast<int>(seeds.size());
  result.errors.assign(seeds.size(), 0.0);

  if (threads <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i)
      result.errors[i] = run_fn(static_cast<int>(i), seeds[i]);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    const int workers = std::min<int>(threads, static_cast<int>(seeds.size()));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < seeds.size();
             i = next.fetch_add(1))
          result.errors[i] = run_fn(static_cast<int>(i), seeds[i]);
      });
    }
    for (auto& t : pool) t.join();
  }

  result.mean = mean_of(result.errors);
  result.std_dev = sample_std(result.errors);
  return result;
}

std::vector<std::vector<int>> stratified_folds(const std::vector<int>& labels,
                                               int folds,
                                               RandomStream& stream) {
  if (folds < 2) throw ParameterError("stratified_folds: need at least 2 folds");
  if (labels.size() < static_cast<std::size_t>(folds))
    throw InsufficientDataError("stratified_folds: fewer samples than folds");

  std::map<int, std::vector<int>> classes;
  for (std::size_t i = 0; i < labels.size(); ++i)
    classes[labels[i]].push_back(static_cast<int>(i));

  std::vector<std::vector<int>> out(folds);
  int next_fold = 0;
  for (auto& [label, members] : classes) {
    stream.shuffle(members);
    for (int idx : members) {
      out[next_fold].push_back(idx);
      next_fold = (next_fold + 1) % folds;
    }
  }
  return out;
}

}  // namespace fsaug
