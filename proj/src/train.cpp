#include "braindec/train.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "braindec/error.hpp"
#include "braindec/io_util.hpp"
#include "braindec/rng.hpp"

namespace braindec::models {
namespace {

constexpr std::uint64_t kShuffleStream = 0x5A11;

std::vector<const Epoch*> gather(const Dataset& ds, std::span<const std::size_t> indices) {
  std::vector<const Epoch*> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(&ds.epochs[i]);
  return out;
}

}  // namespace

double evaluate_loss(const Model& model, const Dataset& ds, const std::vector<std::size_t>& indices, LossKind kind) {
  if (indices.empty()) throw Error("loss over an empty split");
  constexpr std::size_t kChunk = 32;
  double total = 0.0;
  for (std::size_t start = 0; start < indices.size(); start += kChunk) {
    const auto count = std::min(kChunk, indices.size() - start);
    const auto batch = gather(ds, std::span(indices).subspan(start, count));
    total += batch_loss(model, batch, kind) * static_cast<double>(count);
  }
  return total / static_cast<double>(indices.size());
}

TrainResult train(const Dataset& ds, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  if (!(cfg.learning_rate > 0.0)) throw Error("learning rate must be positive");
  if (cfg.batch_size < 1) throw Error("batch size must be at least 1");
  if (cfg.epochs < 1) throw Error("epoch count must be at least 1");
  if (!ds.standardization) throw Error("training requires a standardized dataset");
  auto train_idx = ds.indices(Split::train);
  const auto val_idx = ds.indices(Split::val);
  if (train_idx.empty()) throw Error("train split is empty");
  if (val_idx.empty()) throw Error("validation split is empty");

  ModelShape shape;
  shape.arch = cfg.arch;
  shape.time_steps = static_cast<std::size_t>(ds.epochs[train_idx.front()].data.rows());
  shape.channels = static_cast<std::size_t>(ds.epochs[train_idx.front()].data.cols());
  shape.hidden = cfg.hidden;
  shape.readout = cfg.readout;

  Model model = init_model(shape, cfg.seed);
  AdamState state = AdamState::for_params(model.params);
  const AdamConfig adam{cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps};
  SplitMix64 shuffle(derive_seed(cfg.seed, kShuffleStream));

  TrainResult result;
  result.seed = cfg.seed;
  result.best_val_loss = std::numeric_limits<double>::infinity();

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = train_idx.size(); i-- > 1;) {
      std::swap(train_idx[i], train_idx[static_cast<std::size_t>(shuffle.below(i + 1))]);
    }
    double weighted = 0.0;
    for (std::size_t start = 0; start < train_idx.size(); start += cfg.batch_size) {
      const auto count = std::min(cfg.batch_size, train_idx.size() - start);
      const auto batch = gather(ds, std::span(train_idx).subspan(start, count));
      GradientResult g;
      try {
        g = compute_gradient(model, batch, cfg.loss);
      } catch (const Error& e) {
        throw Error(fmt::format("epoch {}, step {}: {}", epoch, result.optimizer_steps + 1, e.what()));
      }
      adam_step(model.params, g.grad, state, adam);
      ++result.optimizer_steps;
      weighted += g.loss * static_cast<double>(count);
    }
    const double train_loss = weighted / static_cast<double>(train_idx.size());
    const double val_loss = evaluate_loss(model, ds, val_idx, cfg.loss);
    result.train_loss.push_back(train_loss);
    result.val_loss.push_back(val_loss);
    result.epochs_run = epoch;
    if (val_loss < result.best_val_loss) {
      result.best_val_loss = val_loss;
      result.best_epoch = epoch;
      result.best = model;
    }
    if (on_epoch) on_epoch(epoch, train_loss, val_loss);
  }
  if (result.best_epoch == 0) throw Error("validation loss never became finite");
  return result;
}

void write_loss_curve(std::ostream& out, const TrainResult& result) {
  out << "epoch,train_loss,val_loss\n";
  for (std::size_t i = 0; i < result.train_loss.size(); ++i) {
    out << (i + 1) << ',' << format_exact(result.train_loss[i]) << ',' << format_exact(result.val_loss[i]) << '\n';
  }
}

}  // namespace braindec::models
