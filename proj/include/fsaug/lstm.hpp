#pragma once

#include "fsaug/matrix.hpp"
#include "fsaug/random.hpp"

namespace fsaug {

// Parameters of one LSTM layer. The 4*hidden gate axis is laid out in
// blocks [input | forget | candidate | output].
struct LstmLayerParams {
  NumericMatrix w_input;      // input_size x 4*hidden
  NumericMatrix w_recurrent;  // hidden x 4*hidden
  NumericVector bias;         // 4*hidden

  int input_size() const { return static_cast<int>(w_input.rows()); }
  int hidden_size() const { return static_cast<int>(w_recurrent.rows()); }

  static LstmLayerParams zeros(int input_size, int hidden_size);

  // Uniform weights in [-0.08, 0.08], all biases zero except the forget
  // block which starts at +1.
  static LstmLayerParams init(int input_size, int hidden_size,
                              RandomStream& stream);
};

// Hidden and cell state, one row per batch element.
struct LstmState {
  NumericMatrix hidden;  // B x H
  NumericMatrix cell;    // B x H

  static LstmState zeros(int batch, int hidden_size);
};

// Everything the backward pass needs from one forward step.
struct LstmStepCache {
  NumericMatrix input;   // B x I, exactly what the layer consumed
  NumericMatrix h_prev;  // B x H
  NumericMatrix c_prev;  // B x H
  NumericMatrix gate_i, gate_f, gate_g, gate_o;  // B x H, post-activation
  NumericMatrix cell;       // B x H
  NumericMatrix tanh_cell;  // B x H
};

struct LstmLayerGrads {
  NumericMatrix w_input;
  NumericMatrix w_recurrent;
  NumericVector bias;

  static LstmLayerGrads zeros_like(const LstmLayerParams& p);
};

// One gated update:
//   i = sigmoid(x Wx[i] + h Wh[i] + b[i])
//   f = sigmoid(x Wx[f] + h Wh[f] + b[f])
//   g = tanh   (x Wx[g] + h Wh[g] + b[g])
//   o = sigmoid(x Wx[o] + h Wh[o] + b[o])
//   c' = f * c + i * g
//   h' = o * tanh(c')
// Throws DimensionError on inconsistent shapes. When cache is non-null the
// step's intermediates are recorded for lstm_cell_backward.
LstmState lstm_cell_forward(const NumericMatrix& input, const LstmState& prev,
                            const LstmLayerParams& params,
                            LstmStepCache* cache = nullptr);

// Single-sample convenience over the batched form.
struct LstmVectorState {
  NumericVector hidden;
  NumericVector cell;
};
LstmVectorState lstm_cell_forward(const NumericVector& input,
                                  const LstmVectorState& prev,
                                  const LstmLayerParams& params);

// Backward through one step. d_hidden/d_cell are the loss gradients w.r.t.
// this step's outputs (d_cell carries the recurrent cell path from step
// t+1). Parameter gradients accumulate into grads; gradients w.r.t. the
// previous state accumulate into d_hidden_prev/d_cell_prev. Returns the
// gradient w.r.t. the step's input.
NumericMatrix lstm_cell_backward(const LstmLayerParams& params,
                                 const LstmStepCache& cache,
                                 const NumericMatrix& d_hidden,
                                 const NumericMatrix& d_cell,
                                 NumericMatrix& d_hidden_prev,
                                 NumericMatrix& d_cell_prev,
                                 LstmLayerGrads& grads);

}  // namespace fsaug
