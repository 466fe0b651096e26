// braindec: command-line driver for the sentiment decoding pipeline.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "braindec/error.hpp"
#include "braindec/experiment.hpp"
#include "braindec/io_util.hpp"
#include "braindec/log.hpp"
#include "braindec/report.hpp"
#include "braindec/synth.hpp"

namespace fs = std::filesystem;
using namespace braindec;

namespace {

std::ifstream open_in(const fs::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

template <typename Writer>
void write_to(const fs::path& path, Writer&& writer) {
  std::ostringstream out(std::ios::binary);
  writer(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_atomic(path, out.str());
}

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> window_seconds;
  std::string arch;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> workers;
};

void add_common(CLI::App* cmd, Overrides& o, bool need_config) {
  auto* c = cmd->add_option("--config", o.config, "Experiment config (JSON)");
  if (need_config) c->required();
  cmd->add_option("--seed", o.seed, "Split/initialization seed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--window-seconds", o.window_seconds, "Epoch window length in seconds");
}

ExperimentConfig config_with(const Overrides& o) {
  auto cfg = load_config(o.config);
  if (!o.out.empty()) cfg.out = o.out;
  if (o.window_seconds) cfg.window_seconds = *o.window_seconds;
  if (o.seed) cfg.seeds = {*o.seed};
  if (!o.arch.empty()) cfg.architectures = {models::architecture_from_string(o.arch)};
  if (o.epochs) cfg.train.epochs = *o.epochs;
  if (o.workers) cfg.workers = *o.workers;
  validate(cfg);
  return cfg;
}

std::vector<Epoch> epochs_for(const ExperimentConfig& cfg) {
  const auto inputs = load_inputs(cfg);
  for (const auto& w : inputs.warnings) log::warn(w);
  auto extracted = extract_epochs(inputs.recording, inputs.phrases, inputs.labels, cfg.window_seconds);
  if (extracted.skipped > 0) log::warn(fmt::format("{} phrases start beyond the recording end", extracted.skipped));
  return std::move(extracted.epochs);
}

}  // namespace

int main(int argc, char** argv) {
  log::init_from_env();
  CLI::App app{"Decode text-derived sentiment labels from multichannel brain recordings"};
  app.require_subcommand(1);

  // synth
  Overrides synth_o;
  synth::SynthConfig synth_cfg;
  std::vector<double> priors;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic events/labels/recording set");
  synth_cmd->add_option("--config", synth_o.config, "Config whose 'synth' section is used");
  synth_cmd->add_option("--seed", synth_o.seed, "Generator seed");
  synth_cmd->add_option("--out", synth_o.out, "Output directory")->required();
  synth_cmd->add_option("--window-seconds", synth_o.window_seconds, "Signal window per phrase");
  synth_cmd->add_option("--phrases", synth_cfg.n_phrases, "Number of phrases");
  synth_cmd->add_option("--snr", synth_cfg.snr, "Signal amplitude over noise std");
  synth_cmd->add_option("--channels", synth_cfg.n_channels, "Channel count");
  synth_cmd->add_option("--sample-rate", synth_cfg.sample_rate, "Sample rate in Hz");
  synth_cmd->add_option("--priors", priors, "Class priors: neutral positive negative")->expected(3);

  // segment
  std::string events_path, phrases_out;
  double min_pause = 0.0;
  auto* segment_cmd = app.add_subcommand("segment", "Split an events file into pause-delimited phrases");
  segment_cmd->add_option("--events", events_path, "Events file")->required();
  segment_cmd->add_option("--out", phrases_out, "Phrases file to write (stdout if omitted)");
  segment_cmd->add_option("--min-pause", min_pause, "Minimum pause duration that splits (seconds)");

  // validate-labels
  std::string labels_path;
  auto* validate_cmd = app.add_subcommand("validate-labels", "Check a label file");
  validate_cmd->add_option("--labels", labels_path, "Label file")->required();

  // align
  Overrides align_o;
  auto* align_cmd = app.add_subcommand("align", "Extract and standardize epochs; write the split manifest");
  add_common(align_cmd, align_o, true);

  // split
  std::string split_phrases;
  std::uint64_t split_seed = 0;
  std::string split_out;
  auto* split_cmd = app.add_subcommand("split", "Assign phrases to train/val/test");
  split_cmd->add_option("--phrases", split_phrases, "Phrases file")->required();
  split_cmd->add_option("--seed", split_seed, "Split seed")->required();
  split_cmd->add_option("--out", split_out, "Manifest to write (stdout if omitted)");

  // train
  Overrides train_o;
  auto* train_cmd = app.add_subcommand("train", "Train one architecture for one seed");
  add_common(train_cmd, train_o, true);
  train_cmd->add_option("--arch", train_o.arch, "mlp or lstm")->required();
  train_cmd->add_option("--epochs", train_o.epochs, "Training epochs");

  // eval
  Overrides eval_o;
  std::string checkpoint_path;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on the seed's test split");
  add_common(eval_cmd, eval_o, true);
  eval_cmd->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();

  // run
  Overrides run_o;
  auto* run_cmd = app.add_subcommand("run", "Run the multi-seed experiment");
  add_common(run_cmd, run_o, true);
  run_cmd->add_option("--arch", run_o.arch, "Restrict to one architecture");
  run_cmd->add_option("--epochs", run_o.epochs, "Training epochs");
  run_cmd->add_option("--workers", run_o.workers, "Concurrent jobs");

  // compare-models
  std::vector<std::string> compare_labels, compare_names;
  std::string annotations_path, compare_out;
  auto* compare_cmd = app.add_subcommand("compare-models", "Class proportions and human agreement per label file");
  compare_cmd->add_option("--labels", compare_labels, "Label file (repeatable)")->required();
  compare_cmd->add_option("--name", compare_names, "Display name per label file (repeatable)");
  compare_cmd->add_option("--annotations", annotations_path, "Human annotation counts")->required();
  compare_cmd->add_option("--out", compare_out, "Directory for model_comparison.csv");

  // report
  std::string metrics_dir, report_out;
  auto* report_cmd = app.add_subcommand("report", "Render markdown tables from result CSVs");
  report_cmd->add_option("--metrics-dir", metrics_dir, "Directory with summary.csv / model_comparison.csv")->required();
  report_cmd->add_option("--out", report_out, "Markdown file to write (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth_cmd) {
      auto cfg = synth_cfg;
      if (!synth_o.config.empty()) {
        const auto exp = load_config(synth_o.config);
        if (!exp.synth) throw Error("config has no 'synth' section");
        cfg = *exp.synth;
      }
      if (synth_o.seed) cfg.seed = *synth_o.seed;
      if (synth_o.window_seconds) cfg.window_seconds = *synth_o.window_seconds;
      if (!priors.empty()) cfg.class_priors = {priors[0], priors[1], priors[2]};
      synth::write_synth(synth_o.out, synth::generate(cfg));
      std::cout << fmt::format("wrote {} phrases to {}\n", cfg.n_phrases, synth_o.out);
    } else if (*segment_cmd) {
      auto in = open_in(events_path);
      const auto phrases = segment_phrases(parse_events(in), min_pause);
      if (phrases_out.empty()) {
        write_phrases(std::cout, phrases);
      } else {
        write_to(phrases_out, [&](std::ostream& o) { write_phrases(o, phrases); });
      }
    } else if (*validate_cmd) {
      auto in = open_in(labels_path);
      const auto parsed = parse_labels(in);
      for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << fmt::format("{} labels, {} warnings\n", parsed.labels.size(), parsed.warnings.size());
    } else if (*align_cmd) {
      const auto cfg = config_with(align_o);
      const auto ds = prepare_dataset(epochs_for(cfg), cfg, cfg.seeds.front());
      write_to(cfg.out / "manifest.tsv", [&](std::ostream& o) { write_manifest(o, ds); });
      write_to(cfg.out / "channel_stats.tsv", [&](std::ostream& o) { write_channel_stats(o, *ds.standardization); });
      std::cout << fmt::format("{} epochs: {} train, {} val, {} test\n", ds.epochs.size(),
                               ds.indices(Split::train).size(), ds.indices(Split::val).size(),
                               ds.indices(Split::test).size());
    } else if (*split_cmd) {
      auto in = open_in(split_phrases);
      const auto phrases = parse_phrases(in);
      if (phrases.size() < 10) throw Error(fmt::format("need at least 10 phrases to split, have {}", phrases.size()));
      const auto assignment = assign_splits(phrases.size(), SplitFractions{}, split_seed);
      std::ostringstream manifest;
      manifest << "phrase_id\tsplit\n";
      for (std::size_t i = 0; i < phrases.size(); ++i) manifest << phrases[i].id << '\t' << to_string(assignment[i]) << '\n';
      if (split_out.empty()) {
        std::cout << manifest.str();
      } else {
        write_to(split_out, [&](std::ostream& o) { o << manifest.str(); });
      }
    } else if (*train_cmd) {
      const auto cfg = config_with(train_o);
      const auto seed = cfg.seeds.front();
      const auto ds = prepare_dataset(epochs_for(cfg), cfg, seed);
      auto tc = cfg.train;
      tc.arch = cfg.architectures.front();
      tc.seed = seed;
      const auto result = models::train(ds, tc, [](std::size_t epoch, double tl, double vl) {
        log::info(fmt::format("epoch {}: train {:.6f} val {:.6f}", epoch, tl, vl));
      });
      const auto stem = fmt::format("{}_seed{}", models::to_string(tc.arch), seed);
      write_to(cfg.out / (stem + ".mpr"), [&](std::ostream& o) { models::write_checkpoint(o, result.best); });
      write_to(cfg.out / (stem + "_curve.csv"), [&](std::ostream& o) { models::write_loss_curve(o, result); });
      std::cout << fmt::format("best validation loss {:.6f} at epoch {}\n", result.best_val_loss, result.best_epoch);
    } else if (*eval_cmd) {
      const auto cfg = config_with(eval_o);
      const auto seed = cfg.seeds.front();
      const auto ds = prepare_dataset(epochs_for(cfg), cfg, seed);
      auto in = open_in(checkpoint_path, true);
      const auto model = models::read_checkpoint(in);
      const auto eval = evaluate_test_split(model, ds);
      const auto arch = std::string(models::to_string(model.shape.arch));
      write_to(cfg.out / fmt::format("eval_{}_seed{}.csv", arch, seed), [&](std::ostream& o) {
        report::write_metrics_csv(o, {{seed, arch, eval.accuracy, eval.balanced_accuracy}});
      });
      std::cout << fmt::format("accuracy {:.3f}  balanced accuracy {:.3f}  (majority baseline {:.3f})\n", eval.accuracy,
                               eval.balanced_accuracy, eval.majority_baseline);
    } else if (*run_cmd) {
      const auto cfg = config_with(run_o);
      run_experiment(cfg);
      std::cout << report::render_directory(cfg.out);
    } else if (*compare_cmd) {
      if (!compare_names.empty() && compare_names.size() != compare_labels.size()) {
        throw Error("--name must be given once per --labels file");
      }
      auto ann_in = open_in(annotations_path);
      const auto annotations = parse_annotations(ann_in);
      std::vector<report::ModelComparisonRow> rows;
      for (std::size_t i = 0; i < compare_labels.size(); ++i) {
        auto in = open_in(compare_labels[i]);
        const auto parsed = parse_labels(in);
        const auto name = compare_names.empty() ? fs::path(compare_labels[i]).stem().string() : compare_names[i];
        rows.push_back(report::compare_model(name, parsed.labels, annotations));
      }
      if (!compare_out.empty()) {
        write_to(fs::path(compare_out) / "model_comparison.csv",
                 [&](std::ostream& o) { report::write_model_comparison_csv(o, rows); });
      }
      std::cout << report::render_markdown({}, rows);
    } else if (*report_cmd) {
      const auto md = report::render_directory(metrics_dir);
      if (report_out.empty()) {
        std::cout << md;
      } else {
        write_to(report_out, [&](std::ostream& o) { o << md; });
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
