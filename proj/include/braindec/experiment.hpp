#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "braindec/epochs.hpp"
#include "braindec/report.hpp"
#include "braindec/synth.hpp"
#include "braindec/train.hpp"

namespace braindec {

struct InputFiles {
  std::filesystem::path events;
  std::filesystem::path labels;
  std::filesystem::path recording;
};

/// Everything a multi-seed run needs. Defaults reproduce the published
/// protocol: 80/10/10 splits, ten seeds, MLP and LSTM with two layers of 128
/// units, learning rate 1e-4, batch 32, 200 epochs.
struct ExperimentConfig {
  std::optional<InputFiles> inputs;
  std::optional<synth::SynthConfig> synth;  // used when inputs are absent
  double window_seconds = 2.0;
  double min_pause_seconds = 0.0;
  SplitFractions fractions;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<models::Architecture> architectures{models::Architecture::mlp, models::Architecture::lstm};
  models::TrainConfig train;  // arch and seed are set per job
  std::size_t workers = 1;
  bool save_checkpoints = false;
  std::filesystem::path out = "results";
};

/// Parses the JSON config format. Relative input paths resolve against
/// `base_dir`. Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& cfg);

/// Phrases, labels and recording ready for epoching.
struct PipelineInputs {
  std::vector<Phrase> phrases;
  std::vector<SentimentLabel> labels;
  Recording recording;
  std::vector<std::string> warnings;
};

PipelineInputs load_inputs(const ExperimentConfig& cfg);

/// Split by `seed` and standardize with train statistics.
Dataset prepare_dataset(const std::vector<Epoch>& epochs, const ExperimentConfig& cfg, std::uint64_t seed);

struct SeedEvaluation {
  double accuracy = 0.0;           // percent
  double balanced_accuracy = 0.0;  // percent
  double majority_baseline = 0.0;  // percent, from the train split
  metrics::ConfusionMatrix confusion;
  std::vector<models::Prediction> predictions;  // test split, dataset order
};

/// Test-split metrics against argmax of the soft labels.
SeedEvaluation evaluate_test_split(const models::Model& model, const Dataset& ds);

struct JobResult {
  std::uint64_t seed = 0;
  models::Architecture arch = models::Architecture::mlp;
  bool ok = false;
  std::string error;
  SeedEvaluation eval;
  models::TrainResult train;
};

struct ExperimentResult {
  std::vector<JobResult> jobs;  // seed-major, architectures in config order
  std::vector<report::MetricsRow> metrics;
  std::vector<report::SummaryRow> summary;
  std::size_t skipped_phrases = 0;
};

/// Runs every seed x architecture job (up to cfg.workers at a time) and
/// writes metrics.csv, summary.csv, raincloud.csv, curves/*.csv and
/// report.md into cfg.out. Throws Error if any job failed, after writing
/// failures.txt.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace braindec
