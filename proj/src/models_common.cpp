#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "braindec/error.hpp"
#include "braindec/models.hpp"
#include "braindec/rng.hpp"
#include "model_internal.hpp"

namespace braindec::models {
namespace {

constexpr double kProbFloor = 1e-12;
constexpr std::uint64_t kInitStream = 0x1417;

struct BlockSpec {
  std::string name;
  Eigen::Index rows;
  Eigen::Index cols;
};

std::vector<BlockSpec> block_specs(const ModelShape& s) {
  const auto h = static_cast<Eigen::Index>(s.hidden);
  if (s.hidden == 0 || s.time_steps == 0 || s.channels == 0) throw Error("model dimensions must be positive");
  if (s.arch == Architecture::mlp) {
    const auto d = static_cast<Eigen::Index>(s.input_dim());
    return {{"hidden1.weight", h, d}, {"hidden1.bias", h, 1},  {"hidden2.weight", h, h},
            {"hidden2.bias", h, 1},   {"head.weight", 3, h},   {"head.bias", 3, 1}};
  }
  const auto c = static_cast<Eigen::Index>(s.channels);
  return {{"lstm1.w_input", 4 * h, c}, {"lstm1.w_hidden", 4 * h, h}, {"lstm1.bias", 4 * h, 1},
          {"lstm2.w_input", 4 * h, h}, {"lstm2.w_hidden", 4 * h, h}, {"lstm2.bias", 4 * h, 1},
          {"head.weight", 3, h},       {"head.bias", 3, 1}};
}

}  // namespace

std::string_view to_string(Architecture a) { return a == Architecture::mlp ? "mlp" : "lstm"; }

Architecture architecture_from_string(std::string_view name) {
  if (name == "mlp") return Architecture::mlp;
  if (name == "lstm") return Architecture::lstm;
  throw Error(fmt::format("unknown architecture '{}' (expected mlp or lstm)", name));
}

LossKind loss_from_string(std::string_view name) {
  if (name == "cross_entropy") return LossKind::cross_entropy;
  if (name == "mse") return LossKind::mse;
  throw Error(fmt::format("unknown loss '{}' (expected cross_entropy or mse)", name));
}

LstmReadout readout_from_string(std::string_view name) {
  if (name == "last_step") return LstmReadout::last_step;
  if (name == "mean_over_time") return LstmReadout::mean_over_time;
  throw Error(fmt::format("unknown LSTM readout '{}' (expected last_step or mean_over_time)", name));
}

void Parameters::add(std::string name, Eigen::MatrixXd value) {
  blocks_.push_back({std::move(name), std::move(value)});
}

Parameters Parameters::zeros_like() const {
  Parameters out;
  for (const auto& b : blocks_) out.add(b.name, Eigen::MatrixXd::Zero(b.value.rows(), b.value.cols()));
  return out;
}

std::size_t Parameters::scalar_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += static_cast<std::size_t>(b.value.size());
  return n;
}

void Parameters::require_finite(std::string_view what) const {
  for (const auto& b : blocks_) {
    if (!b.value.allFinite()) throw Error(fmt::format("non-finite {} in parameter block {}", what, b.name));
  }
}

Model zero_model(const ModelShape& shape) {
  Model m;
  m.shape = shape;
  for (const auto& spec : block_specs(shape)) m.params.add(spec.name, Eigen::MatrixXd::Zero(spec.rows, spec.cols));
  return m;
}

Model init_model(const ModelShape& shape, std::uint64_t seed) {
  Model m = zero_model(shape);
  SplitMix64 rng(derive_seed(seed, kInitStream));
  const auto h = static_cast<Eigen::Index>(shape.hidden);
  for (auto& block : m.params) {
    auto& w = block.value;
    if (w.cols() == 1) {
      // biases
      if (shape.arch == Architecture::lstm && block.name.starts_with("lstm")) w.middleRows(h, h).setOnes();
      continue;
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = bound * (2.0 * rng.uniform() - 1.0);
    }
  }
  return m;
}

void validate_model(const Model& model) {
  const auto specs = block_specs(model.shape);
  if (specs.size() != model.params.size()) {
    throw Error(fmt::format("expected {} parameter blocks, found {}", specs.size(), model.params.size()));
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& b = model.params[i];
    if (b.name != specs[i].name || b.value.rows() != specs[i].rows || b.value.cols() != specs[i].cols) {
      throw Error(fmt::format("parameter block {} ({} [{} x {}]) does not match expected {} [{} x {}]", i, b.name,
                              b.value.rows(), b.value.cols(), specs[i].name, specs[i].rows, specs[i].cols));
    }
  }
}

Probs softmax(const Eigen::Vector3d& logits) {
  const double top = logits.maxCoeff();
  Eigen::Vector3d e = (logits.array() - top).exp();
  e /= e.sum();
  return {e[0], e[1], e[2]};
}

double soft_label_loss(const Probs& pred, const Probs& target, LossKind kind) {
  double loss = 0.0;
  for (int k = 0; k < kNumClasses; ++k) {
    if (kind == LossKind::cross_entropy) {
      if (target[k] > 0.0) loss -= target[k] * std::log(std::max(pred[k], kProbFloor));
    } else {
      loss += (pred[k] - target[k]) * (pred[k] - target[k]);
    }
  }
  return loss;
}

namespace detail {

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index b = 0; b < logits.cols(); ++b) {
    const auto p = softmax(logits.col(b));
    out.col(b) << p[0], p[1], p[2];
  }
  return out;
}

Eigen::MatrixXd batch_targets(Batch batch) {
  Eigen::MatrixXd y(3, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& p = batch[b]->label.probs;
    y.col(static_cast<Eigen::Index>(b)) << p[0], p[1], p[2];
  }
  return y;
}

double loss_and_dlogits(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& targets, LossKind kind,
                        Eigen::MatrixXd* dlogits) {
  const auto n = probs.cols();
  double total = 0.0;
  for (Eigen::Index b = 0; b < n; ++b) {
    total += soft_label_loss({probs(0, b), probs(1, b), probs(2, b)}, {targets(0, b), targets(1, b), targets(2, b)},
                             kind);
  }
  if (dlogits != nullptr) {
    const double inv_n = 1.0 / static_cast<double>(n);
    if (kind == LossKind::cross_entropy) {
      // softmax + cross-entropy: d/dz = p * sum(y) - y
      const Eigen::RowVectorXd mass = targets.colwise().sum();
      *dlogits = ((probs.array().rowwise() * mass.array()) - targets.array()).matrix() * inv_n;
    } else {
      // through the softmax Jacobian diag(p) - p p^T
      const Eigen::MatrixXd g = 2.0 * (probs - targets) * inv_n;
      const Eigen::RowVectorXd pg = (probs.array() * g.array()).colwise().sum();
      *dlogits = (probs.array() * (g.array().rowwise() - pg.array())).matrix();
    }
  }
  return total / static_cast<double>(n);
}

}  // namespace detail

Probs mlp_forward(const Model& model, std::span<const double> x) {
  if (model.shape.arch != Architecture::mlp) throw Error("mlp_forward called on a non-MLP model");
  if (x.size() != model.shape.input_dim()) {
    throw Error(fmt::format("MLP input has {} values, model expects {}", x.size(), model.shape.input_dim()));
  }
  Epoch ep;
  ep.data = Eigen::Map<const SignalMatrix>(x.data(), static_cast<Eigen::Index>(model.shape.time_steps),
                                           static_cast<Eigen::Index>(model.shape.channels));
  const Epoch* ptr = &ep;
  return forward_batch(model, Batch(&ptr, 1)).front();
}

Probs lstm_forward(const Model& model, const SignalMatrix& x) {
  if (model.shape.arch != Architecture::lstm) throw Error("lstm_forward called on a non-LSTM model");
  Epoch ep;
  ep.data = x;
  const Epoch* ptr = &ep;
  return forward_batch(model, Batch(&ptr, 1)).front();
}

Probs forward(const Model& model, const SignalMatrix& x) {
  Epoch ep;
  ep.data = x;
  const Epoch* ptr = &ep;
  return forward_batch(model, Batch(&ptr, 1)).front();
}

std::vector<Probs> forward_batch(const Model& model, Batch batch) {
  if (batch.empty()) return {};
  const Eigen::MatrixXd logits = model.shape.arch == Architecture::mlp ? detail::mlp_batch_logits(model, batch)
                                                                       : detail::lstm_batch_logits(model, batch);
  std::vector<Probs> out;
  out.reserve(batch.size());
  for (Eigen::Index b = 0; b < logits.cols(); ++b) out.push_back(softmax(logits.col(b)));
  return out;
}

double batch_loss(const Model& model, Batch batch, LossKind kind) {
  if (batch.empty()) throw Error("loss of an empty batch");
  const Eigen::MatrixXd logits = model.shape.arch == Architecture::mlp ? detail::mlp_batch_logits(model, batch)
                                                                       : detail::lstm_batch_logits(model, batch);
  return detail::loss_and_dlogits(detail::softmax_columns(logits), detail::batch_targets(batch), kind, nullptr);
}

GradientResult compute_gradient(const Model& model, Batch batch, LossKind kind) {
  if (batch.empty()) throw Error("gradient of an empty batch");
  GradientResult out;
  out.grad = model.params.zeros_like();
  out.loss = model.shape.arch == Architecture::mlp ? detail::mlp_gradient(model, batch, kind, out.grad)
                                                   : detail::lstm_gradient(model, batch, kind, out.grad);
  out.grad.require_finite("gradient");
  if (!std::isfinite(out.loss)) throw Error("non-finite loss");
  return out;
}

std::vector<Prediction> predict(const Model& model, const std::vector<Epoch>& epochs) {
  constexpr std::size_t kChunk = 32;
  std::vector<Prediction> out;
  out.reserve(epochs.size());
  std::vector<const Epoch*> chunk;
  for (std::size_t start = 0; start < epochs.size(); start += kChunk) {
    chunk.clear();
    for (std::size_t i = start; i < std::min(epochs.size(), start + kChunk); ++i) chunk.push_back(&epochs[i]);
    for (const auto& p : forward_batch(model, chunk)) out.push_back({p, argmax_class(p)});
  }
  return out;
}

}  // namespace braindec::models
