#pragma once

#include <Eigen/Core>

#include "braindec/models.hpp"

namespace braindec::models::detail {

// Column-wise softmax of a [3 x B] logit block.
Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits);

// [3 x B] soft targets of the batch.
Eigen::MatrixXd batch_targets(Batch batch);

// Mean batch loss of [3 x B] probabilities; fills d(mean loss)/d(logits)
// when `dlogits` is non-null.
double loss_and_dlogits(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& targets, LossKind kind,
                        Eigen::MatrixXd* dlogits);

Eigen::MatrixXd mlp_batch_logits(const Model& model, Batch batch);
double mlp_gradient(const Model& model, Batch batch, LossKind kind, Parameters& grad);

Eigen::MatrixXd lstm_batch_logits(const Model& model, Batch batch);
double lstm_gradient(const Model& model, Batch batch, LossKind kind, Parameters& grad);

}  // namespace braindec::models::detail
