#include "fsaug/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fsaug {

namespace {
// split tags for the sub-streams consumed during training
constexpr std::uint64_t kValSplitTag = 0x5641'4c53'504c'4954ULL;
constexpr std::uint64_t kDropoutTag = 0x44524f'50ULL;
constexpr std::uint64_t kEpochTagBase = 0x45504f'4348ULL;
}  // namespace

void adam_step(const TensorViews& params, const TensorViews& grads,
               AdamState& state) {
  if (params.size() != grads.size())
    throw DimensionError("adam_step: parameter/gradient list size mismatch");
  if (state.m.empty()) {
    state.m.reserve(params.size());
    state.v.reserve(params.size());
    for (const auto& p : params) {
      state.m.push_back(NumericVector::Zero(p.size()));
      state.v.push_back(NumericVector::Zero(p.size()));
    }
  }
  if (state.m.size() != params.size())
    throw DimensionError("adam_step: state does not match parameter list");

  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));

  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != grads[i].size() ||
        params[i].size() != state.m[i].size())
      throw DimensionError("adam_step: tensor shape mismatch at " + params[i].name);
    auto p = params[i].flat();
    auto g = grads[i].flat();
    auto& m = state.m[i];
    auto& v = state.v[i];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      const double m_hat = m[k] / bc1;
      const double v_hat = v[k] / bc2;
      p[k] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

double plateau_update(PlateauSchedule& schedule, double validation_loss,
                      double current_rate) {
  if (std::isnan(validation_loss))
    throw InvalidLossError("plateau_update: validation loss is NaN");
  const double bar = schedule.best_validation_loss *
                     (1.0 - schedule.min_rel_improvement);
  if (validation_loss < bar || !std::isfinite(schedule.best_validation_loss)) {
    schedule.best_validation_loss = validation_loss;
    schedule.epochs_since_improvement = 0;
    return current_rate;
  }
  schedule.epochs_since_improvement += 1;
  if (schedule.epochs_since_improvement >= schedule.patience) {
    schedule.epochs_since_improvement = 0;
    return current_rate * schedule.factor;
  }
  return current_rate;
}

namespace {

double clip_gradients(const TensorViews& grads, double clip_norm) {
  double sq = 0.0;
  for (const auto& g : grads) sq += g.flat().squaredNorm();
  const double norm = std::sqrt(sq);
  if (clip_norm > 0.0 && norm > clip_norm) {
    const double scale = clip_norm / norm;
    for (const auto& g : grads) g.flat() *= scale;
  }
  return norm;
}

// Equal-length batches in seeded-shuffled order: shuffle within each length
// bucket, chop into batch_size chunks, then shuffle the chunk order.
std::vector<std::vector<int>> make_batches(
    const std::vector<SequenceSample>& dataset, const std::vector<int>& indices,
    int batch_size, RandomStream& stream) {
  std::map<int, std::vector<int>> buckets;
  for (int idx : indices) buckets[dataset[idx].length()].push_back(idx);

  std::vector<std::vector<int>> batches;
  for (auto& [length, bucket] : buckets) {
    stream.shuffle(bucket);
    for (std::size_t start = 0; start < bucket.size(); start += batch_size) {
      const std::size_t end = std::min(bucket.size(), start + batch_size);
      batches.emplace_back(bucket.begin() + start, bucket.begin() + end);
    }
  }
  stream.shuffle(batches);
  return batches;
}

double validation_loss(const AutoencoderModel& model,
                       const std::vector<SequenceSample>& dataset,
                       const std::vector<int>& val_indices, int batch_size,
                       bool reverse) {
  std::map<int, std::vector<int>> buckets;
  for (int idx : val_indices) buckets[dataset[idx].length()].push_back(idx);
  double acc = 0.0;
  long count = 0;
  for (const auto& [length, bucket] : buckets) {
    for (std::size_t start = 0; start < bucket.size(); start += batch_size) {
      const std::size_t end = std::min(bucket.size(), start + batch_size);
      std::vector<const NumericMatrix*> batch;
      for (std::size_t i = start; i < end; ++i)
        batch.push_back(&dataset[bucket[i]].values);
      acc += autoencoder_eval_loss(model, batch, reverse) *
             static_cast<double>(batch.size());
      count += static_cast<long>(batch.size());
    }
  }
  return acc / static_cast<double>(count);
}

}  // namespace

SaTrainResult train_autoencoder(AutoencoderModel& model,
                                const std::vector<SequenceSample>& dataset,
                                const UpdateBudget& budget,
                                const SaTrainConfig& config,
                                RandomStream& stream) {
  if (dataset.empty())
    throw InsufficientDataError("train_autoencoder: empty dataset");
  if (budget.total_weight_updates < 1)
    throw ParameterError("train_autoencoder: budget must be > 0");
  if (dataset.size() < 2)
    throw InsufficientDataError(
        "train_autoencoder: need at least 2 samples for a validation split");

  // deterministic validation split
  std::vector<int> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  RandomStream split_stream = stream.split(kValSplitTag);
  split_stream.shuffle(order);
  const int val_count = std::max<int>(
      1, static_cast<int>(std::lround(config.val_fraction *
                                      static_cast<double>(dataset.size()))));
  std::vector<int> val_indices(order.begin(), order.begin() + val_count);
  std::vector<int> train_indices(order.begin() + val_count, order.end());
  if (train_indices.empty())
    throw InsufficientDataError("train_autoencoder: validation split left no training data");

  RandomStream mask_stream = stream.split(kDropoutTag);
  AdamState adam(config.learning_rate);
  PlateauSchedule schedule;
  schedule.patience = config.plateau_patience;
  schedule.factor = config.plateau_factor;
  schedule.min_rel_improvement = config.min_rel_improvement;

  EncodeDecodeOptions opts;
  opts.reverse = config.reverse_inputs;
  opts.train_mode = model.dropout_prob > 0.0;

  SaTrainResult result;
  long updates = 0;
  int epoch = 0;
  const TensorViews param_views = parameter_views(model);
  while (updates < budget.total_weight_updates) {
    epoch += 1;
    RandomStream epoch_stream = stream.split(kEpochTagBase + static_cast<std::uint64_t>(epoch));
    const auto batches =
        make_batches(dataset, train_indices, config.batch_size, epoch_stream);

    double loss_acc = 0.0;
    long sample_acc = 0;
    for (const auto& batch_indices : batches) {
      std::vector<const NumericMatrix*> batch;
      batch.reserve(batch_indices.size());
      for (int idx : batch_indices) batch.push_back(&dataset[idx].values);

      const AeForwardCache cache =
          autoencoder_forward(model, batch, opts, &mask_stream);
      AutoencoderGrads grads = autoencoder_backward(model, batch, cache);
      clip_gradients(parameter_views(grads), config.clip_norm);
      adam_step(param_views, parameter_views(grads), adam);

      loss_acc += cache.loss * static_cast<double>(batch.size());
      sample_acc += static_cast<long>(batch.size());
      updates += 1;
      if (updates >= budget.total_weight_updates) break;
    }

    const double train_loss = loss_acc / static_cast<double>(sample_acc);
    const double val_loss = validation_loss(model, dataset, val_indices,
                                            config.batch_size, opts.reverse);
    adam.learning_rate = plateau_update(schedule, val_loss, adam.learning_rate);
    result.history.push_back({epoch, train_loss, val_loss, adam.learning_rate});
  }
  result.updates_performed = updates;
  return result;
}

}  // namespace fsaug
