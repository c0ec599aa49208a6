#pragma once

#include <vector>

#include "fsaug/lstm.hpp"
#include "fsaug/matrix.hpp"
#include "fsaug/random.hpp"
#include "fsaug/tensor_view.hpp"

namespace fsaug {

// Two-layer stacked LSTM encoder plus a two-layer decoder that is
// conditioned on the context vector at every time step:
//
//   context  c   = top encoder hidden state at the final input step
//   decoder      h_{-1} of both layers is seeded with c, cells start at 0
//   step t input = [y_{t-1}, c]   (y_{-1} = 0)
//   y_t          = top decoder hidden state * w_out + b_out
//
// The decoder is free-running during training as well: it consumes its own
// projected outputs, never the ground truth.
//
// Dropout (train mode only) applies to the layer-1 output feeding layer 2
// in both stacks, and optionally to the context vector itself. Whether the
// reference training recipe drops the context is ambiguous; it is a flag
// here, default on.
struct AutoencoderModel {
  LstmLayerParams encoder0;  // features -> hidden
  LstmLayerParams encoder1;  // hidden -> hidden
  LstmLayerParams decoder0;  // features + hidden -> hidden
  LstmLayerParams decoder1;  // hidden -> hidden
  NumericMatrix w_out;       // hidden x features
  NumericVector b_out;       // features
  double dropout_prob = 0.2;
  bool context_dropout = true;

  int feature_dim() const { return encoder0.input_size(); }
  int hidden_size() const { return encoder1.hidden_size(); }

  static AutoencoderModel zeros(int feature_dim, int hidden_size);
  static AutoencoderModel init(int feature_dim, int hidden_size,
                               RandomStream& stream);
};

struct AutoencoderGrads {
  LstmLayerGrads encoder0, encoder1, decoder0, decoder1;
  NumericMatrix w_out;
  NumericVector b_out;

  static AutoencoderGrads zeros_like(const AutoencoderModel& model);
};

// Ordered parameter lists; model and gradient orders line up.
TensorViews parameter_views(AutoencoderModel& model);
TensorViews parameter_views(AutoencoderGrads& grads);

struct EncodeDecodeOptions {
  bool reverse = true;     // feed the input sequence last step first
  bool train_mode = false; // enables dropout; requires a stream
};

// Context vector of a single sequence (rows = time). train_mode applies the
// between-layer dropout only; context dropout belongs to the training
// forward pass, not to encoding as such.
ContextVector encode(const AutoencoderModel& model, const NumericMatrix& sequence,
                     const EncodeDecodeOptions& opts,
                     RandomStream* stream = nullptr);

// Decode `length` steps from a context vector; returns length x features.
NumericMatrix decode(const AutoencoderModel& model, const ContextVector& context,
                     int length, bool train_mode = false,
                     RandomStream* stream = nullptr);

// Mean squared error over all timesteps and features.
double reconstruction_loss(const NumericMatrix& pred, const NumericMatrix& target);

// Training-time forward over a batch of equal-length sequences. Stores every
// intermediate needed for the exact backward pass; masks are drawn from
// `stream` in a fixed order (encoder steps, context, decoder steps).
struct AeForwardCache {
  int batch = 0;
  int time = 0;
  int features = 0;
  bool train_mode = false;
  double inv_keep = 1.0;

  std::vector<LstmStepCache> enc0, enc1;
  std::vector<NumericMatrix> enc_mask;  // per step, batch x hidden
  NumericMatrix context_raw;            // batch x hidden, pre-dropout
  NumericMatrix context_mask;
  NumericMatrix context;                // what the decoder consumed

  std::vector<LstmStepCache> dec0, dec1;
  std::vector<NumericMatrix> dec_mask;
  std::vector<NumericMatrix> outputs;   // per step, batch x features

  double loss = 0.0;
};

AeForwardCache autoencoder_forward(const AutoencoderModel& model,
                                   const std::vector<const NumericMatrix*>& batch,
                                   const EncodeDecodeOptions& opts,
                                   RandomStream* stream);

// Exact gradient of the cached forward's loss w.r.t. every parameter,
// including the paths through the context vector into each decoder step.
AutoencoderGrads autoencoder_backward(const AutoencoderModel& model,
                                      const std::vector<const NumericMatrix*>& batch,
                                      const AeForwardCache& cache);

// Single-sample convenience: forward + backward in one call.
AutoencoderGrads autoencoder_gradients(const AutoencoderModel& model,
                                       const NumericMatrix& sequence,
                                       const EncodeDecodeOptions& opts,
                                       RandomStream* stream,
                                       double* loss_out = nullptr);

// Reconstruction loss in eval mode (no dropout, no caches kept).
double autoencoder_eval_loss(const AutoencoderModel& model,
                             const std::vector<const NumericMatrix*>& batch,
                             bool reverse);

}  // namespace fsaug
