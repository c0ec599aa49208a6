#include "fsaug/autoencoder.hpp"

#include <array>
#include <cmath>
#include <string>

namespace fsaug {

namespace {

NumericMatrix draw_mask(Eigen::Index rows, Eigen::Index cols, double p,
                        RandomStream& stream) {
  // Inverted dropout: entries are 0 (dropped) or 1/(1-p), row-major draw order.
  const double inv = 1.0 / (1.0 - p);
  NumericMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = stream.uniform() >= p ? inv : 0.0;
  return m;
}

void encoder_step(const AutoencoderModel& model, const NumericMatrix& x_t,
                  LstmState& s0, LstmState& s1, const NumericMatrix* mask,
                  LstmStepCache* c0, LstmStepCache* c1) {
  s0 = lstm_cell_forward(x_t, s0, model.encoder0, c0);
  NumericMatrix layer2_in =
      mask != nullptr ? s0.hidden.cwiseProduct(*mask) : s0.hidden;
  s1 = lstm_cell_forward(layer2_in, s1, model.encoder1, c1);
}

NumericMatrix decoder_step(const AutoencoderModel& model,
                           const NumericMatrix& context,
                           const NumericMatrix& prev_out, LstmState& s0,
                           LstmState& s1, const NumericMatrix* mask,
                           LstmStepCache* c0, LstmStepCache* c1) {
  const Eigen::Index batch = context.rows();
  NumericMatrix input(batch, prev_out.cols() + context.cols());
  input.leftCols(prev_out.cols()) = prev_out;
  input.rightCols(context.cols()) = context;
  s0 = lstm_cell_forward(input, s0, model.decoder0, c0);
  NumericMatrix layer2_in =
      mask != nullptr ? s0.hidden.cwiseProduct(*mask) : s0.hidden;
  s1 = lstm_cell_forward(layer2_in, s1, model.decoder1, c1);
  NumericMatrix y = s1.hidden * model.w_out;
  y.rowwise() += model.b_out.transpose();
  return y;
}

NumericMatrix gather_step(const std::vector<const NumericMatrix*>& batch,
                          int t, bool reverse) {
  const int time = static_cast<int>(batch.front()->rows());
  const Eigen::Index features = batch.front()->cols();
  NumericMatrix x(static_cast<Eigen::Index>(batch.size()), features);
  const int row = reverse ? time - 1 - t : t;
  for (std::size_t b = 0; b < batch.size(); ++b) x.row(b) = batch[b]->row(row);
  return x;
}

void check_batch(const AutoencoderModel& model,
                 const std::vector<const NumericMatrix*>& batch) {
  if (batch.empty())
    throw InsufficientDataError("autoencoder: empty batch");
  const auto time = batch.front()->rows();
  if (time < 1) throw InsufficientDataError("autoencoder: empty sequence");
  for (const auto* seq : batch) {
    if (seq->rows() != time)
      throw DimensionError("autoencoder: batch mixes sequence lengths");
    if (seq->cols() != model.feature_dim())
      throw DimensionError("autoencoder: feature dim " +
                           std::to_string(seq->cols()) + " != model " +
                           std::to_string(model.feature_dim()));
  }
}

}  // namespace

AutoencoderModel AutoencoderModel::zeros(int feature_dim, int hidden_size) {
  AutoencoderModel m;
  m.encoder0 = LstmLayerParams::zeros(feature_dim, hidden_size);
  m.encoder1 = LstmLayerParams::zeros(hidden_size, hidden_size);
  m.decoder0 = LstmLayerParams::zeros(feature_dim + hidden_size, hidden_size);
  m.decoder1 = LstmLayerParams::zeros(hidden_size, hidden_size);
  m.w_out = NumericMatrix::Zero(hidden_size, feature_dim);
  m.b_out = NumericVector::Zero(feature_dim);
  return m;
}

AutoencoderModel AutoencoderModel::init(int feature_dim, int hidden_size,
                                        RandomStream& stream) {
  AutoencoderModel m = zeros(feature_dim, hidden_size);
  m.encoder0 = LstmLayerParams::init(feature_dim, hidden_size, stream);
  m.encoder1 = LstmLayerParams::init(hidden_size, hidden_size, stream);
  m.decoder0 = LstmLayerParams::init(feature_dim + hidden_size, hidden_size, stream);
  m.decoder1 = LstmLayerParams::init(hidden_size, hidden_size, stream);
  for (Eigen::Index i = 0; i < m.w_out.rows(); ++i)
    for (Eigen::Index j = 0; j < m.w_out.cols(); ++j)
      m.w_out(i, j) = stream.uniform(-0.08, 0.08);
  return m;
}

AutoencoderGrads AutoencoderGrads::zeros_like(const AutoencoderModel& model) {
  AutoencoderGrads g;
  g.encoder0 = LstmLayerGrads::zeros_like(model.encoder0);
  g.encoder1 = LstmLayerGrads::zeros_like(model.encoder1);
  g.decoder0 = LstmLayerGrads::zeros_like(model.decoder0);
  g.decoder1 = LstmLayerGrads::zeros_like(model.decoder1);
  g.w_out = NumericMatrix::Zero(model.w_out.rows(), model.w_out.cols());
  g.b_out = NumericVector::Zero(model.b_out.size());
  return g;
}

namespace {

template <typename Layers>
TensorViews views_impl(Layers& layers, NumericMatrix& w_out, NumericVector& b_out) {
  TensorViews out;
  const char* names[4] = {"encoder0", "encoder1", "decoder0", "decoder1"};
  int idx = 0;
  for (auto* layer : layers) {
    const std::string base = names[idx++];
    out.push_back({base + ".w_input", layer->w_input.data(),
                   layer->w_input.rows(), layer->w_input.cols()});
    out.push_back({base + ".w_recurrent", layer->w_recurrent.data(),
                   layer->w_recurrent.rows(), layer->w_recurrent.cols()});
    out.push_back({base + ".bias", layer->bias.data(), layer->bias.size(), 1});
  }
  out.push_back({"w_out", w_out.data(), w_out.rows(), w_out.cols()});
  out.push_back({"b_out", b_out.data(), b_out.size(), 1});
  return out;
}

}  // namespace

TensorViews parameter_views(AutoencoderModel& model) {
  std::array<LstmLayerParams*, 4> layers{&model.encoder0, &model.encoder1,
                                         &model.decoder0, &model.decoder1};
  return views_impl(layers, model.w_out, model.b_out);
}

TensorViews parameter_views(AutoencoderGrads& grads) {
  std::array<LstmLayerGrads*, 4> layers{&grads.encoder0, &grads.encoder1,
                                        &grads.decoder0, &grads.decoder1};
  return views_impl(layers, grads.w_out, grads.b_out);
}

ContextVector encode(const AutoencoderModel& model, const NumericMatrix& sequence,
                     const EncodeDecodeOptions& opts, RandomStream* stream) {
  if (sequence.rows() < 1)
    throw InsufficientDataError("encode: empty sequence");
  if (sequence.cols() != model.feature_dim())
    throw DimensionError("encode: feature dim mismatch");
  if (opts.train_mode && stream == nullptr)
    throw ParameterError("encode: train mode requires a random stream");

  const int hidden = model.hidden_size();
  const int time = static_cast<int>(sequence.rows());
  const bool dropout = opts.train_mode && model.dropout_prob > 0.0;
  LstmState s0 = LstmState::zeros(1, hidden);
  LstmState s1 = LstmState::zeros(1, hidden);
  for (int t = 0; t < time; ++t) {
    NumericMatrix x(1, sequence.cols());
    x.row(0) = sequence.row(opts.reverse ? time - 1 - t : t);
    NumericMatrix mask;
    if (dropout) mask = draw_mask(1, hidden, model.dropout_prob, *stream);
    encoder_step(model, x, s0, s1, dropout ? &mask : nullptr, nullptr, nullptr);
  }
  return s1.hidden.row(0).transpose();
}

NumericMatrix decode(const AutoencoderModel& model, const ContextVector& context,
                     int length, bool train_mode, RandomStream* stream) {
  if (length < 1) throw ParameterError("decode: length must be >= 1");
  if (context.size() != model.hidden_size())
    throw DimensionError("decode: context length mismatch");
  if (train_mode && stream == nullptr)
    throw ParameterError("decode: train mode requires a random stream");

  const int hidden = model.hidden_size();
  const int features = model.feature_dim();
  const bool dropout = train_mode && model.dropout_prob > 0.0;

  NumericMatrix ctx(1, hidden);
  ctx.row(0) = context.transpose();
  LstmState s0{ctx, NumericMatrix::Zero(1, hidden)};
  LstmState s1{ctx, NumericMatrix::Zero(1, hidden)};
  NumericMatrix prev_out = NumericMatrix::Zero(1, features);

  NumericMatrix out(length, features);
  for (int t = 0; t < length; ++t) {
    NumericMatrix mask;
    if (dropout) mask = draw_mask(1, hidden, model.dropout_prob, *stream);
    prev_out = decoder_step(model, ctx, prev_out, s0, s1,
                            dropout ? &mask : nullptr, nullptr, nullptr);
    out.row(t) = prev_out.row(0);
  }
  return out;
}

double reconstruction_loss(const NumericMatrix& pred, const NumericMatrix& target) {
  require_same_shape(pred, target, "reconstruction_loss");
  const double n = static_cast<double>(pred.rows() * pred.cols());
  return (pred - target).squaredNorm() / n;
}

AeForwardCache autoencoder_forward(const AutoencoderModel& model,
                                   const std::vector<const NumericMatrix*>& batch,
                                   const EncodeDecodeOptions& opts,
                                   RandomStream* stream) {
  check_batch(model, batch);
  if (opts.train_mode && stream == nullptr)
    throw ParameterError("autoencoder_forward: train mode requires a stream");

  const int batch_size = static_cast<int>(batch.size());
  const int time = static_cast<int>(batch.front()->rows());
  const int hidden = model.hidden_size();
  const int features = model.feature_dim();
  const bool dropout = opts.train_mode && model.dropout_prob > 0.0;

  AeForwardCache cache;
  cache.batch = batch_size;
  cache.time = time;
  cache.features = features;
  cache.train_mode = opts.train_mode;
  cache.inv_keep = dropout ? 1.0 / (1.0 - model.dropout_prob) : 1.0;
  cache.enc0.resize(time);
  cache.enc1.resize(time);
  if (dropout) cache.enc_mask.resize(time);

  // encoder
  LstmState s0 = LstmState::zeros(batch_size, hidden);
  LstmState s1 = LstmState::zeros(batch_size, hidden);
  for (int t = 0; t < time; ++t) {
    const NumericMatrix x = gather_step(batch, t, opts.reverse);
    const NumericMatrix* mask = nullptr;
    if (dropout) {
      cache.enc_mask[t] = draw_mask(batch_size, hidden, model.dropout_prob, *stream);
      mask = &cache.enc_mask[t];
    }
    encoder_step(model, x, s0, s1, mask, &cache.enc0[t], &cache.enc1[t]);
  }
  cache.context_raw = s1.hidden;

  if (dropout && model.context_dropout) {
    cache.context_mask = draw_mask(batch_size, hidden, model.dropout_prob, *stream);
    cache.context = cache.context_raw.cwiseProduct(cache.context_mask);
  } else {
    cache.context = cache.context_raw;
  }

  // decoder, free-running, reconstructing the original (non-reversed) order
  cache.dec0.resize(time);
  cache.dec1.resize(time);
  if (dropout) cache.dec_mask.resize(time);
  cache.outputs.resize(time);

  LstmState d0{cache.context, NumericMatrix::Zero(batch_size, hidden)};
  LstmState d1{cache.context, NumericMatrix::Zero(batch_size, hidden)};
  NumericMatrix prev_out = NumericMatrix::Zero(batch_size, features);
  double sq_err = 0.0;
  for (int t = 0; t < time; ++t) {
    const NumericMatrix* mask = nullptr;
    if (dropout) {
      cache.dec_mask[t] = draw_mask(batch_size, hidden, model.dropout_prob, *stream);
      mask = &cache.dec_mask[t];
    }
    prev_out = decoder_step(model, cache.context, prev_out, d0, d1, mask,
                            &cache.dec0[t], &cache.dec1[t]);
    cache.outputs[t] = prev_out;
    const NumericMatrix target_t = gather_step(batch, t, /*reverse=*/false);
    sq_err += (prev_out - target_t).squaredNorm();
  }
  cache.loss = sq_err / static_cast<double>(batch_size * time * features);
  return cache;
}

AutoencoderGrads autoencoder_backward(const AutoencoderModel& model,
                                      const std::vector<const NumericMatrix*>& batch,
                                      const AeForwardCache& cache) {
  check_batch(model, batch);
  const int batch_size = cache.batch;
  const int time = cache.time;
  const int hidden = model.hidden_size();
  const int features = cache.features;
  const bool dropout = cache.train_mode && model.dropout_prob > 0.0;
  const double loss_scale = 2.0 / static_cast<double>(batch_size * time * features);

  AutoencoderGrads grads = AutoencoderGrads::zeros_like(model);

  // decoder, reversed in time
  NumericMatrix d_feedback = NumericMatrix::Zero(batch_size, features);
  NumericMatrix d_h_top = NumericMatrix::Zero(batch_size, hidden);
  NumericMatrix d_c_top = NumericMatrix::Zero(batch_size, hidden);
  NumericMatrix d_h_bot = NumericMatrix::Zero(batch_size, hidden);
  NumericMatrix d_c_bot = NumericMatrix::Zero(batch_size, hidden);
  NumericMatrix d_context = NumericMatrix::Zero(batch_size, hidden);

  for (int t = time - 1; t >= 0; --t) {
    const NumericMatrix target_t = gather_step(batch, t, /*reverse=*/false);
    NumericMatrix d_y = loss_scale * (cache.outputs[t] - target_t) + d_feedback;

    const NumericMatrix h_top =
        cache.dec1[t].gate_o.cwiseProduct(cache.dec1[t].tanh_cell);
    grads.w_out.noalias() += h_top.transpose() * d_y;
    grads.b_out += d_y.colwise().sum().transpose();

    NumericMatrix d_h_top_t = d_y * model.w_out.transpose() + d_h_top;
    d_h_top.setZero();
    NumericMatrix d_c_top_in = d_c_top;
    d_c_top.setZero();
    NumericMatrix d_top_in =
        lstm_cell_backward(model.decoder1, cache.dec1[t], d_h_top_t, d_c_top_in,
                           d_h_top, d_c_top, grads.decoder1);
    if (dropout) d_top_in = d_top_in.cwiseProduct(cache.dec_mask[t]);

    NumericMatrix d_h_bot_t = d_top_in + d_h_bot;
    d_h_bot.setZero();
    NumericMatrix d_c_bot_in = d_c_bot;
    d_c_bot.setZero();
    NumericMatrix d_input =
        lstm_cell_backward(model.decoder0, cache.dec0[t], d_h_bot_t, d_c_bot_in,
                           d_h_bot, d_c_bot, grads.decoder0);
    d_feedback = d_input.leftCols(features);
    d_context += d_input.rightCols(hidden);
  }
  // seeding of both decoder hidden states at step 0
  d_context += d_h_bot + d_h_top;

  if (dropout && model.context_dropout)
    d_context = d_context.cwiseProduct(cache.context_mask);

  // encoder, reversed in time
  NumericMatrix d_h1 = d_context;
  NumericMatrix d_c1 = NumericMatrix::Zero(batch_size, hidden);
  NumericMatrix d_h0 = NumericMatrix::Zero(batch_size, hidden);
  NumericMatrix d_c0 = NumericMatrix::Zero(batch_size, hidden);
  for (int t = time - 1; t >= 0; --t) {
    NumericMatrix d_h1_next = NumericMatrix::Zero(batch_size, hidden);
    NumericMatrix d_c1_next = NumericMatrix::Zero(batch_size, hidden);
    NumericMatrix d_layer2_in =
        lstm_cell_backward(model.encoder1, cache.enc1[t], d_h1, d_c1,
                           d_h1_next, d_c1_next, grads.encoder1);
    if (dropout) d_layer2_in = d_layer2_in.cwiseProduct(cache.enc_mask[t]);

    NumericMatrix d_h0_t = d_layer2_in + d_h0;
    d_h0.setZero();
    NumericMatrix d_c0_in = d_c0;
    d_c0.setZero();
    lstm_cell_backward(model.encoder0, cache.enc0[t], d_h0_t, d_c0_in, d_h0,
                       d_c0, grads.encoder0);

    d_h1 = d_h1_next;
    d_c1 = d_c1_next;
  }
  return grads;
}

AutoencoderGrads autoencoder_gradients(const AutoencoderModel& model,
                                       const NumericMatrix& sequence,
                                       const EncodeDecodeOptions& opts,
                                       RandomStream* stream, double* loss_out) {
  std::vector<const NumericMatrix*> batch{&sequence};
  const AeForwardCache cache = autoencoder_forward(model, batch, opts, stream);
  if (loss_out != nullptr) *loss_out = cache.loss;
  return autoencoder_backward(model, batch, cache);
}

double autoencoder_eval_loss(const AutoencoderModel& model,
                             const std::vector<const NumericMatrix*>& batch,
                             bool reverse) {
  check_batch(model, batch);
  const int batch_size = static_cast<int>(batch.size());
  const int time = static_cast<int>(batch.front()->rows());
  const int hidden = model.hidden_size();
  const int features = model.feature_dim();

  LstmState s0 = LstmState::zeros(batch_size, hidden);
  LstmState s1 = LstmState::zeros(batch_size, hidden);
  for (int t = 0; t < time; ++t) {
    encoder_step(model, gather_step(batch, t, reverse), s0, s1, nullptr,
                 nullptr, nullptr);
  }
  const NumericMatrix context = s1.hidden;
  LstmState d0{context, NumericMatrix::Zero(batch_size, hidden)};
  LstmState d1{context, NumericMatrix::Zero(batch_size, hidden)};
  NumericMatrix prev_out = NumericMatrix::Zero(batch_size, features);
  double sq_err = 0.0;
  for (int t = 0; t < time; ++t) {
    prev_out = decoder_step(model, context, prev_out, d0, d1, nullptr, nullptr,
                            nullptr);
    sq_err += (prev_out - gather_step(batch, t, false)).squaredNorm();
  }
  return sq_err / static_cast<double>(batch_size * time * features);
}

}  // namespace fsaug
