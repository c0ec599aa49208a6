#include "fsaug/lstm.hpp"

#include <cmath>

namespace fsaug {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_shapes(const NumericMatrix& input, const LstmState& prev,
                  const LstmLayerParams& params) {
  const int hidden = params.hidden_size();
  if (params.w_input.cols() != 4 * hidden ||
      params.w_recurrent.cols() != 4 * hidden ||
      params.bias.size() != 4 * hidden) {
    throw DimensionError("lstm_cell_forward: gate axis mismatch");
  }
  if (input.cols() != params.input_size()) {
    throw DimensionError("lstm_cell_forward: input width " +
                         std::to_string(input.cols()) + " != " +
                         std::to_string(params.input_size()));
  }
  if (prev.hidden.rows() != input.rows() || prev.cell.rows() != input.rows() ||
      prev.hidden.cols() != hidden || prev.cell.cols() != hidden) {
    throw DimensionError("lstm_cell_forward: state shape mismatch");
  }
}

}  // namespace

LstmLayerParams LstmLayerParams::zeros(int input_size, int hidden_size) {
  LstmLayerParams p;
  p.w_input = NumericMatrix::Zero(input_size, 4 * hidden_size);
  p.w_recurrent = NumericMatrix::Zero(hidden_size, 4 * hidden_size);
  p.bias = NumericVector::Zero(4 * hidden_size);
  return p;
}

LstmLayerParams LstmLayerParams::init(int input_size, int hidden_size,
                                      RandomStream& stream) {
  LstmLayerParams p = zeros(input_size, hidden_size);
  for (Eigen::Index i = 0; i < p.w_input.rows(); ++i)
    for (Eigen::Index j = 0; j < p.w_input.cols(); ++j)
      p.w_input(i, j) = stream.uniform(-0.08, 0.08);
  for (Eigen::Index i = 0; i < p.w_recurrent.rows(); ++i)
    for (Eigen::Index j = 0; j < p.w_recurrent.cols(); ++j)
      p.w_recurrent(i, j) = stream.uniform(-0.08, 0.08);
  p.bias.segment(hidden_size, hidden_size).setConstant(1.0);
  return p;
}

LstmState LstmState::zeros(int batch, int hidden_size) {
  return {NumericMatrix::Zero(batch, hidden_size),
          NumericMatrix::Zero(batch, hidden_size)};
}

LstmLayerGrads LstmLayerGrads::zeros_like(const LstmLayerParams& p) {
  LstmLayerGrads g;
  g.w_input = NumericMatrix::Zero(p.w_input.rows(), p.w_input.cols());
  g.w_recurrent = NumericMatrix::Zero(p.w_recurrent.rows(), p.w_recurrent.cols());
  g.bias = NumericVector::Zero(p.bias.size());
  return g;
}

LstmState lstm_cell_forward(const NumericMatrix& input, const LstmState& prev,
                            const LstmLayerParams& params,
                            LstmStepCache* cache) {
  check_shapes(input, prev, params);
  const int hidden = params.hidden_size();

  NumericMatrix pre = input * params.w_input + prev.hidden * params.w_recurrent;
  pre.rowwise() += params.bias.transpose();

  NumericMatrix gate_i = pre.leftCols(hidden).unaryExpr([](double x) { return sigmoid(x); });
  NumericMatrix gate_f = pre.middleCols(hidden, hidden).unaryExpr([](double x) { return sigmoid(x); });
  NumericMatrix gate_g = pre.middleCols(2 * hidden, hidden).array().tanh();
  NumericMatrix gate_o = pre.rightCols(hidden).unaryExpr([](double x) { return sigmoid(x); });

  LstmState next;
  next.cell = gate_f.cwiseProduct(prev.cell) + gate_i.cwiseProduct(gate_g);
  NumericMatrix tanh_cell = next.cell.array().tanh();
  next.hidden = gate_o.cwiseProduct(tanh_cell);

  if (cache != nullptr) {
    cache->input = input;
    cache->h_prev = prev.hidden;
    cache->c_prev = prev.cell;
    cache->gate_i = std::move(gate_i);
    cache->gate_f = std::move(gate_f);
    cache->gate_g = std::move(gate_g);
    cache->gate_o = std::move(gate_o);
    cache->cell = next.cell;
    cache->tanh_cell = std::move(tanh_cell);
  }
  return next;
}

LstmVectorState lstm_cell_forward(const NumericVector& input,
                                  const LstmVectorState& prev,
                                  const LstmLayerParams& params) {
  LstmState prev_batch{prev.hidden.transpose(), prev.cell.transpose()};
  NumericMatrix x(1, input.size());
  x.row(0) = input.transpose();
  const LstmState next = lstm_cell_forward(x, prev_batch, params);
  return {next.hidden.row(0).transpose(), next.cell.row(0).transpose()};
}

NumericMatrix lstm_cell_backward(const LstmLayerParams& params,
                                 const LstmStepCache& cache,
                                 const NumericMatrix& d_hidden,
                                 const NumericMatrix& d_cell,
                                 NumericMatrix& d_hidden_prev,
                                 NumericMatrix& d_cell_prev,
                                 LstmLayerGrads& grads) {
  const int hidden = params.hidden_size();
  const Eigen::Index batch = cache.input.rows();

  // h' = o * tanh(c'), c' = f*c + i*g
  NumericMatrix d_o = d_hidden.cwiseProduct(cache.tanh_cell);
  NumericMatrix d_c = d_cell +
      d_hidden.cwiseProduct(cache.gate_o)
          .cwiseProduct((1.0 - cache.tanh_cell.array().square()).matrix());

  NumericMatrix d_i = d_c.cwiseProduct(cache.gate_g);
  NumericMatrix d_f = d_c.cwiseProduct(cache.c_prev);
  NumericMatrix d_g = d_c.cwiseProduct(cache.gate_i);

  // through the activations
  NumericMatrix d_pre(batch, 4 * hidden);
  d_pre.leftCols(hidden) =
      d_i.cwiseProduct(cache.gate_i).cwiseProduct((1.0 - cache.gate_i.array()).matrix());
  d_pre.middleCols(hidden, hidden) =
      d_f.cwiseProduct(cache.gate_f).cwiseProduct((1.0 - cache.gate_f.array()).matrix());
  d_pre.middleCols(2 * hidden, hidden) =
      d_g.cwiseProduct((1.0 - cache.gate_g.array().square()).matrix());
  d_pre.rightCols(hidden) =
      d_o.cwiseProduct(cache.gate_o).cwiseProduct((1.0 - cache.gate_o.array()).matrix());

  grads.w_input.noalias() += cache.input.transpose() * d_pre;
  grads.w_recurrent.noalias() += cache.h_prev.transpose() * d_pre;
  grads.bias += d_pre.colwise().sum().transpose();

  d_hidden_prev.noalias() += d_pre * params.w_recurrent.transpose();
  d_cell_prev += d_c.cwiseProduct(cache.gate_f);

  return d_pre * params.w_input.transpose();
}

}  // namespace fsaug
