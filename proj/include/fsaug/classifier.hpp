#pragma once

#include <functional>
#include <vector>

#include "fsaug/matrix.hpp"
#include "fsaug/optimizer.hpp"
#include "fsaug/random.hpp"
#include "fsaug/tensor_view.hpp"

namespace fsaug {

// Two hidden layers (affine + ReLU) of equal width, affine output, softmax
// probabilities. Dropout p = 0.5 after each hidden layer in train mode.
struct MlpModel {
  NumericMatrix w1, w2, w3;
  NumericVector b1, b2, b3;
  double dropout_prob = 0.5;

  int input_size() const { return static_cast<int>(w1.rows()); }
  int hidden_size() const { return static_cast<int>(w1.cols()); }
  int num_classes() const { return static_cast<int>(w3.cols()); }

  static MlpModel zeros(int input, int hidden, int classes);
  // He-scaled normal weights, zero biases.
  static MlpModel init(int input, int hidden, int classes, RandomStream& stream);
};

struct MlpGrads {
  NumericMatrix w1, w2, w3;
  NumericVector b1, b2, b3;

  static MlpGrads zeros_like(const MlpModel& model);
};

TensorViews parameter_views(MlpModel& model);
TensorViews parameter_views(MlpGrads& grads);

// Class probabilities for one input; sums to 1. Dropout masks are drawn from
// `stream` only in train mode.
NumericVector mlp_forward(const MlpModel& model, const NumericVector& x,
                          bool train_mode = false,
                          RandomStream* stream = nullptr);

// Mean cross-entropy over a batch plus exact gradients (batch rows of
// `features` selected by `rows`).
double mlp_loss_and_grads(const MlpModel& model, const NumericMatrix& features,
                          const std::vector<int>& labels,
                          const std::vector<int>& rows, RandomStream* stream,
                          bool train_mode, MlpGrads& grads);

struct ClassifierTrainConfig {
  int batch_size = 32;
  double learning_rate = 0.001;
};

struct ClassifierTrainResult {
  long updates_performed = 0;
  std::vector<double> epoch_loss;
};

// Minimizes cross-entropy with Adam for exactly budget.total_weight_updates
// steps, cycling seeded-shuffled epochs as needed.
ClassifierTrainResult train_classifier(MlpModel& model,
                                       const NumericMatrix& features,
                                       const std::vector<int>& labels,
                                       const UpdateBudget& budget,
                                       const ClassifierTrainConfig& config,
                                       RandomStream& stream);

// Test error in percent; argmax prediction, ties to the lowest class index.
double evaluate(const MlpModel& model, const NumericMatrix& features,
                const std::vector<int>& labels);

struct EvalResult {
  std::vector<double> errors;  // one per run/fold, percent
  double mean = 0.0;
  double std_dev = 0.0;  // sample convention
  int runs = 0;
};

// Runs `run_fn(run_index, seed)` once per seed and aggregates mean +/- sample
// std. Runs are independent; with threads > 1 they execute in parallel and
// the result is identical to the sequential order.
EvalResult repeated_eval(const std::vector<std::uint64_t>& seeds,
                         const std::function<double(int, std::uint64_t)>& run_fn,
                         int threads = 1);

// Class-stratified k-fold assignment; folds are disjoint and exhaustive.
std::vector<std::vector<int>> stratified_folds(const std::vector<int>& labels,
                                               int folds, RandomStream& stream);

}  // namespace fsaug
