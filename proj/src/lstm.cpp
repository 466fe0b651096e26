// Two stacked LSTM layers with a linear head on the top layer's readout.
//
// Sequences are processed batch-major within each time step: column
// t * B + b of every [rows x T*B] block holds sample b at time t, so the
// input projections and weight gradients of a whole sequence are single
// matrix products and only the recurrent terms are stepped in time.

#include <cmath>

#include <fmt/format.h>

#include "braindec/error.hpp"
#include "model_internal.hpp"

namespace braindec::models::detail {
namespace {

constexpr int kLayers = 2;
constexpr int kHeadW = 6;
constexpr int kHeadB = 7;

int w_input(int layer) { return 3 * layer; }
int w_hidden(int layer) { return 3 * layer + 1; }
int bias(int layer) { return 3 * layer + 2; }

struct LayerCache {
  Eigen::MatrixXd gates;    // [4H x TB] activated: sigma(i), sigma(f), tanh(g), sigma(o)
  Eigen::MatrixXd cell;     // [H x TB]
  Eigen::MatrixXd tanh_cell;
  Eigen::MatrixXd hidden;   // [H x TB]
};

// [C x T*B] input block.
Eigen::MatrixXd sequence_batch(const Model& model, Batch batch) {
  const auto steps = static_cast<Eigen::Index>(model.shape.time_steps);
  const auto channels = static_cast<Eigen::Index>(model.shape.channels);
  const auto n = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd x(channels, steps * n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const auto& data = batch[static_cast<std::size_t>(b)]->data;
    if (data.rows() != steps || data.cols() != channels) {
      throw Error(fmt::format("epoch shape [{} x {}] does not match model input [{} x {}]", data.rows(), data.cols(),
                              steps, channels));
    }
    for (Eigen::Index t = 0; t < steps; ++t) x.col(t * n + b) = data.row(t).transpose();
  }
  return x;
}

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) { return (1.0 / (1.0 + (-z.array()).exp())).matrix(); }

LayerCache run_layer(const Model& model, int layer, const Eigen::MatrixXd& input, Eigen::Index n) {
  const auto& p = model.params;
  const auto h = static_cast<Eigen::Index>(model.shape.hidden);
  const auto steps = input.cols() / n;
  const auto& wh = p[w_hidden(layer)].value;

  LayerCache cache;
  cache.gates.noalias() = p[w_input(layer)].value * input;
  cache.gates.colwise() += p[bias(layer)].value.col(0);
  cache.cell.resize(h, input.cols());
  cache.tanh_cell.resize(h, input.cols());
  cache.hidden.resize(h, input.cols());

  Eigen::MatrixXd pre(4 * h, n);
  for (Eigen::Index t = 0; t < steps; ++t) {
    auto gates = cache.gates.middleCols(t * n, n);
    pre = gates;
    if (t > 0) pre.noalias() += wh * cache.hidden.middleCols((t - 1) * n, n);
    gates.topRows(2 * h) = sigmoid(pre.topRows(2 * h));
    gates.middleRows(2 * h, h) = pre.middleRows(2 * h, h).array().tanh().matrix();
    gates.bottomRows(h) = sigmoid(pre.bottomRows(h));

    auto cell = cache.cell.middleCols(t * n, n);
    cell = gates.topRows(h).cwiseProduct(gates.middleRows(2 * h, h));
    if (t > 0) cell += gates.middleRows(h, h).cwiseProduct(cache.cell.middleCols((t - 1) * n, n));
    cache.tanh_cell.middleCols(t * n, n) = cell.array().tanh().matrix();
    cache.hidden.middleCols(t * n, n) = gates.bottomRows(h).cwiseProduct(cache.tanh_cell.middleCols(t * n, n));
  }
  return cache;
}

// [H x B] readout of the top layer.
Eigen::MatrixXd readout(const Model& model, const Eigen::MatrixXd& hidden, Eigen::Index n) {
  const auto steps = hidden.cols() / n;
  if (model.shape.readout == LstmReadout::last_step) return hidden.rightCols(n);
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(hidden.rows(), n);
  for (Eigen::Index t = 0; t < steps; ++t) pooled += hidden.middleCols(t * n, n);
  return pooled / static_cast<double>(steps);
}

struct ForwardPass {
  Eigen::MatrixXd input;
  std::array<LayerCache, kLayers> layers;
  Eigen::MatrixXd top;  // readout [H x B]
  Eigen::MatrixXd logits;
};

ForwardPass run_forward(const Model& model, Batch batch) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  ForwardPass fp;
  fp.input = sequence_batch(model, batch);
  fp.layers[0] = run_layer(model, 0, fp.input, n);
  fp.layers[1] = run_layer(model, 1, fp.layers[0].hidden, n);
  fp.top = readout(model, fp.layers[1].hidden, n);
  fp.logits.noalias() = model.params[kHeadW].value * fp.top;
  fp.logits.colwise() += model.params[kHeadB].value.col(0);
  return fp;
}

// Backpropagates d(loss)/d(hidden) of one layer through time. Accumulates
// that layer's weight gradients and returns d(loss)/d(layer input).
Eigen::MatrixXd backward_layer(const Model& model, int layer, const LayerCache& cache, const Eigen::MatrixXd& input,
                               const Eigen::MatrixXd& dhidden_ext, Eigen::Index n, Parameters& grad) {
  const auto h = static_cast<Eigen::Index>(model.shape.hidden);
  const auto steps = input.cols() / n;
  const auto& wh = model.params[w_hidden(layer)].value;

  Eigen::MatrixXd dgates(4 * h, input.cols());
  Eigen::MatrixXd dh_next = Eigen::MatrixXd::Zero(h, n);
  Eigen::MatrixXd dc_next = Eigen::MatrixXd::Zero(h, n);
  Eigen::MatrixXd dh(h, n), dc(h, n);

  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const auto cols = [&](const Eigen::MatrixXd& m) { return m.middleCols(t * n, n); };
    const auto gates = cols(cache.gates);
    const auto in_gate = gates.topRows(h).array();
    const auto forget = gates.middleRows(h, h).array();
    const auto candidate = gates.middleRows(2 * h, h).array();
    const auto out_gate = gates.bottomRows(h).array();
    const auto tanh_c = cols(cache.tanh_cell).array();

    dh = cols(dhidden_ext) + dh_next;
    dc = (dc_next.array() + dh.array() * out_gate * (1.0 - tanh_c.square())).matrix();

    auto dg = dgates.middleCols(t * n, n);
    dg.topRows(h) = (dc.array() * candidate * in_gate * (1.0 - in_gate)).matrix();
    if (t > 0) {
      dg.middleRows(h, h) =
          (dc.array() * cache.cell.middleCols((t - 1) * n, n).array() * forget * (1.0 - forget)).matrix();
    } else {
      dg.middleRows(h, h).setZero();
    }
    dg.middleRows(2 * h, h) = (dc.array() * in_gate * (1.0 - candidate.square())).matrix();
    dg.bottomRows(h) = (dh.array() * tanh_c * out_gate * (1.0 - out_gate)).matrix();

    dc_next = (dc.array() * forget).matrix();
    dh_next.noalias() = wh.transpose() * dg;
  }

  grad[w_input(layer)].value.noalias() = dgates * input.transpose();
  grad[bias(layer)].value = dgates.rowwise().sum();
  if (steps > 1) {
    grad[w_hidden(layer)].value.noalias() =
        dgates.rightCols((steps - 1) * n) * cache.hidden.leftCols((steps - 1) * n).transpose();
  } else {
    grad[w_hidden(layer)].value.setZero();
  }
  return model.params[w_input(layer)].value.transpose() * dgates;
}

}  // namespace

Eigen::MatrixXd lstm_batch_logits(const Model& model, Batch batch) { return run_forward(model, batch).logits; }

double lstm_gradient(const Model& model, Batch batch, LossKind kind, Parameters& grad) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  const auto fp = run_forward(model, batch);
  Eigen::MatrixXd dlogits;
  const double loss = loss_and_dlogits(softmax_columns(fp.logits), batch_targets(batch), kind, &dlogits);

  grad[kHeadW].value.noalias() = dlogits * fp.top.transpose();
  grad[kHeadB].value = dlogits.rowwise().sum();
  const Eigen::MatrixXd dtop = model.params[kHeadW].value.transpose() * dlogits;

  const auto steps = fp.input.cols() / n;
  Eigen::MatrixXd dhidden = Eigen::MatrixXd::Zero(dtop.rows(), fp.input.cols());
  if (model.shape.readout == LstmReadout::last_step) {
    dhidden.rightCols(n) = dtop;
  } else {
    for (Eigen::Index t = 0; t < steps; ++t) dhidden.middleCols(t * n, n) = dtop / static_cast<double>(steps);
  }
  for (int layer = kLayers - 1; layer >= 0; --layer) {
    const auto& input = layer == 0 ? fp.input : fp.layers[layer - 1].hidden;
    dhidden = backward_layer(model, layer, fp.layers[layer], input, dhidden, n, grad);
  }
  return loss;
}

}  // namespace braindec::models::detail
