#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <vector>

#include "braindec/epochs.hpp"
#include "braindec/models.hpp"

namespace braindec::models {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Parameters m;
  Parameters v;
  std::int64_t step = 0;

  static AdamState for_params(const Parameters& params);
};

/// Bias-corrected Adam update in place.
void adam_step(Parameters& params, const Parameters& grads, AdamState& state, const AdamConfig& cfg);

struct TrainConfig {
  Architecture arch = Architecture::mlp;
  std::size_t hidden = 128;
  double learning_rate = 1e-4;
  std::size_t batch_size = 32;
  std::size_t epochs = 200;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  LossKind loss = LossKind::cross_entropy;
  LstmReadout readout = LstmReadout::last_step;
};

struct TrainResult {
  Model best;                      // lowest validation loss checkpoint
  std::vector<double> train_loss;  // per epoch, sample-weighted mean of batch losses
  std::vector<double> val_loss;    // per epoch, after the epoch's updates
  double best_val_loss = 0.0;
  std::size_t best_epoch = 0;      // 1-based
  std::uint64_t seed = 0;
  std::size_t epochs_run = 0;
  std::size_t optimizer_steps = 0;
};

using EpochCallback = std::function<void(std::size_t epoch, double train_loss, double val_loss)>;

/// Trains on the train split, selecting by validation loss. The dataset must
/// be standardized. Deterministic given (ds, cfg).
TrainResult train(const Dataset& ds, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

/// Mean loss over the given dataset indices.
double evaluate_loss(const Model& model, const Dataset& ds, const std::vector<std::size_t>& indices, LossKind kind);

/// Checkpoint: "MPR1", u32 version (1), u32 architecture (0 mlp, 1 lstm),
/// u32 readout (0 last step, 1 mean over time), u64 time steps, u64 channels,
/// u64 hidden, u32 block count, then per block (in model block order) u64 rows,
/// u64 cols and rows*cols f64 values in row-major order. All little-endian.
void write_checkpoint(std::ostream& out, const Model& model);
Model read_checkpoint(std::istream& in);

/// CSV `epoch,train_loss,val_loss`.
void write_loss_curve(std::ostream& out, const TrainResult& result);

}  // namespace braindec::models
