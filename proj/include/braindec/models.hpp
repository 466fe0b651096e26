#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "braindec/epochs.hpp"
#include "braindec/labels.hpp"

namespace braindec::models {

enum class Architecture : std::uint32_t { mlp = 0, lstm = 1 };
enum class LossKind { cross_entropy, mse };
enum class LstmReadout : std::uint32_t { last_step = 0, mean_over_time = 1 };

std::string_view to_string(Architecture a);
Architecture architecture_from_string(std::string_view name);
LossKind loss_from_string(std::string_view name);
LstmReadout readout_from_string(std::string_view name);

struct ParamBlock {
  std::string name;
  Eigen::MatrixXd value;
};

/// Ordered list of named parameter blocks. Gradients and optimizer moments
/// use the same type with the same block order.
class Parameters {
 public:
  void add(std::string name, Eigen::MatrixXd value);

  std::size_t size() const { return blocks_.size(); }
  ParamBlock& operator[](std::size_t i) { return blocks_[i]; }
  const ParamBlock& operator[](std::size_t i) const { return blocks_[i]; }
  auto begin() { return blocks_.begin(); }
  auto end() { return blocks_.end(); }
  auto begin() const { return blocks_.begin(); }
  auto end() const { return blocks_.end(); }

  Parameters zeros_like() const;
  std::size_t scalar_count() const;
  /// Throws Error naming the first block holding a NaN or infinity.
  void require_finite(std::string_view what) const;

 private:
  std::vector<ParamBlock> blocks_;
};

struct ModelShape {
  Architecture arch = Architecture::mlp;
  std::size_t time_steps = 0;  // T
  std::size_t channels = 0;    // C
  std::size_t hidden = 128;
  LstmReadout readout = LstmReadout::last_step;

  std::size_t input_dim() const { return time_steps * channels; }
  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

/// Block order.
/// MLP:  hidden1.weight [H x T*C], hidden1.bias [H x 1], hidden2.weight [H x H],
///       hidden2.bias [H x 1], head.weight [3 x H], head.bias [3 x 1].
/// LSTM: lstm1.w_input [4H x C], lstm1.w_hidden [4H x H], lstm1.bias [4H x 1],
///       lstm2.w_input [4H x H], lstm2.w_hidden [4H x H], lstm2.bias [4H x 1],
///       head.weight [3 x H], head.bias [3 x 1].
/// LSTM gate rows are stacked input, forget, cell candidate, output.
struct Model {
  ModelShape shape;
  Parameters params;
};

/// Zero-valued parameters of the right shapes.
Model zero_model(const ModelShape& shape);

/// Glorot-uniform weights in +-sqrt(6 / (rows + cols)), zero biases, LSTM
/// forget-gate biases at 1.0. Deterministic in `seed`.
Model init_model(const ModelShape& shape, std::uint64_t seed);

/// Checks that every block has the shape `shape` implies.
void validate_model(const Model& model);

Probs softmax(const Eigen::Vector3d& logits);

/// Single-sample forward passes. The MLP takes the time-major flattened epoch.
Probs mlp_forward(const Model& model, std::span<const double> x);
Probs lstm_forward(const Model& model, const SignalMatrix& x);
Probs forward(const Model& model, const SignalMatrix& x);

/// Cross-entropy against soft targets (pred clamped at 1e-12), or the summed
/// squared error over the three probabilities.
double soft_label_loss(const Probs& pred, const Probs& target, LossKind kind = LossKind::cross_entropy);

using Batch = std::span<const Epoch* const>;

/// Batched forward pass; one probability triple per epoch.
std::vector<Probs> forward_batch(const Model& model, Batch batch);

/// Mean loss over the batch.
double batch_loss(const Model& model, Batch batch, LossKind kind = LossKind::cross_entropy);

struct GradientResult {
  double loss = 0.0;  // mean batch loss
  Parameters grad;    // d(mean loss) / d(params)
};

/// Analytic gradient of the mean batch loss (backprop for the MLP, full BPTT
/// for the LSTM). Throws Error naming the block if anything goes non-finite.
GradientResult compute_gradient(const Model& model, Batch batch, LossKind kind = LossKind::cross_entropy);

struct Prediction {
  Probs probs{};
  Sentiment cls = Sentiment::neutral;
};

std::vector<Prediction> predict(const Model& model, const std::vector<Epoch>& epochs);

}  // namespace braindec::models
