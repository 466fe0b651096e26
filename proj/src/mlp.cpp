// Two-hidden-layer ReLU perceptron over the flattened (time-major) epoch.

#include <fmt/format.h>

#include "braindec/error.hpp"
#include "model_internal.hpp"

namespace braindec::models::detail {
namespace {

enum Block { kW1 = 0, kB1, kW2, kB2, kWo, kBo };

// [T*C x B] design matrix, one flattened epoch per column.
Eigen::MatrixXd flatten_batch(const Model& model, Batch batch) {
  const auto dim = static_cast<Eigen::Index>(model.shape.input_dim());
  Eigen::MatrixXd x(dim, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& data = batch[b]->data;
    if (static_cast<std::size_t>(data.rows()) != model.shape.time_steps ||
        static_cast<std::size_t>(data.cols()) != model.shape.channels) {
      throw Error(fmt::format("epoch shape [{} x {}] does not match model input [{} x {}]", data.rows(), data.cols(),
                              model.shape.time_steps, model.shape.channels));
    }
    x.col(static_cast<Eigen::Index>(b)) = Eigen::Map<const Eigen::VectorXd>(data.data(), dim);
  }
  return x;
}

struct Activations {
  Eigen::MatrixXd x, z1, a1, z2, a2, logits;
};

Activations run_forward(const Model& model, Batch batch) {
  const auto& p = model.params;
  Activations act;
  act.x = flatten_batch(model, batch);
  act.z1.noalias() = p[kW1].value * act.x;
  act.z1.colwise() += p[kB1].value.col(0);
  act.a1 = act.z1.cwiseMax(0.0);
  act.z2.noalias() = p[kW2].value * act.a1;
  act.z2.colwise() += p[kB2].value.col(0);
  act.a2 = act.z2.cwiseMax(0.0);
  act.logits.noalias() = p[kWo].value * act.a2;
  act.logits.colwise() += p[kBo].value.col(0);
  return act;
}

}  // namespace

Eigen::MatrixXd mlp_batch_logits(const Model& model, Batch batch) { return run_forward(model, batch).logits; }

double mlp_gradient(const Model& model, Batch batch, LossKind kind, Parameters& grad) {
  const auto& p = model.params;
  const auto act = run_forward(model, batch);
  Eigen::MatrixXd dz;
  const double loss = loss_and_dlogits(softmax_columns(act.logits), batch_targets(batch), kind, &dz);

  grad[kWo].value.noalias() = dz * act.a2.transpose();
  grad[kBo].value = dz.rowwise().sum();

  Eigen::MatrixXd da = p[kWo].value.transpose() * dz;
  dz = (act.z2.array() > 0.0).select(da.array(), 0.0).matrix();
  grad[kW2].value.noalias() = dz * act.a1.transpose();
  grad[kB2].value = dz.rowwise().sum();

  da.noalias() = p[kW2].value.transpose() * dz;
  dz = (act.z1.array() > 0.0).select(da.array(), 0.0).matrix();
  grad[kW1].value.noalias() = dz * act.x.transpose();
  grad[kB1].value = dz.rowwise().sum();
  return loss;
}

}  // namespace braindec::models::detail
