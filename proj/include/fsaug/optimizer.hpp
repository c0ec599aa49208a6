#pragma once

#include <limits>
#include <vector>

#include "fsaug/autoencoder.hpp"
#include "fsaug/sample.hpp"
#include "fsaug/tensor_view.hpp"

namespace fsaug {

// Adam with bias correction. Moment accumulators mirror the parameter list
// they are first used with.
struct AdamState {
  double learning_rate;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step_count = 0;
  std::vector<NumericVector> m;
  std::vector<NumericVector> v;

  explicit AdamState(double lr) : learning_rate(lr) {
    if (lr <= 0.0) throw ParameterError("AdamState: learning rate must be > 0");
  }
};

// One update: moments decay toward the gradient, bias-corrected estimates
// move each parameter by -lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(const TensorViews& params, const TensorViews& grads,
               AdamState& state);

// Halve the learning rate after `patience` consecutive epochs without
// validation improvement. Improvement means strictly below the best loss by
// at least min_rel_improvement relative, so float jitter cannot reset the
// counter.
struct PlateauSchedule {
  int patience = 10;
  double factor = 0.5;
  double min_rel_improvement = 1e-6;
  double best_validation_loss = std::numeric_limits<double>::infinity();
  int epochs_since_improvement = 0;
};

// Feed one epoch's validation loss; returns the (possibly halved) rate.
// NaN loss throws InvalidLossError.
double plateau_update(PlateauSchedule& schedule, double validation_loss,
                      double current_rate);

struct UpdateBudget {
  long total_weight_updates = 0;
};

struct SaTrainConfig {
  int batch_size = 32;
  double learning_rate = 0.001;
  int plateau_patience = 10;
  double plateau_factor = 0.5;
  double min_rel_improvement = 1e-6;
  double val_fraction = 0.1;
  double clip_norm = 0.0;  // 0 disables clipping
  bool reverse_inputs = true;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double learning_rate = 0.0;
};

struct SaTrainResult {
  std::vector<EpochRecord> history;
  long updates_performed = 0;
};

// Trains the autoencoder in place for exactly budget.total_weight_updates
// Adam steps, cycling epochs as needed. The dataset is split into train and
// validation deterministically from `stream`; sequences are batched by
// length bucket in seeded-shuffled order.
SaTrainResult train_autoencoder(AutoencoderModel& model,
                                const std::vector<SequenceSample>& dataset,
                                const UpdateBudget& budget,
                                const SaTrainConfig& config,
                                RandomStream& stream);

}  // namespace fsaug
