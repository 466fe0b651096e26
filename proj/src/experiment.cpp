#include "braindec/experiment.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "braindec/error.hpp"
#include "braindec/io_util.hpp"
#include "braindec/log.hpp"

namespace braindec {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!obj.is_object()) throw Error(fmt::format("config: '{}' must be an object", where));
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(fmt::format("config: unknown key '{}' in {}", key, where));
    }
  }
}

template <typename T>
void read_opt(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

synth::SynthConfig parse_synth(const json& j) {
  reject_unknown(j,
                 {"n_phrases", "class_priors", "snr", "sample_rate", "n_channels", "window_seconds", "min_words",
                  "max_words", "seed"},
                 "synth");
  synth::SynthConfig s;
  read_opt(j, "n_phrases", s.n_phrases);
  if (j.contains("class_priors")) {
    const auto priors = j.at("class_priors").get<std::vector<double>>();
    if (priors.size() != 3) throw Error("config: synth.class_priors needs 3 values");
    s.class_priors = {priors[0], priors[1], priors[2]};
  }
  read_opt(j, "snr", s.snr);
  read_opt(j, "sample_rate", s.sample_rate);
  read_opt(j, "n_channels", s.n_channels);
  read_opt(j, "window_seconds", s.window_seconds);
  read_opt(j, "min_words", s.min_words);
  read_opt(j, "max_words", s.max_words);
  read_opt(j, "seed", s.seed);
  return s;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

std::string to_text(auto&& writer) {
  std::ostringstream out(std::ios::binary);
  writer(out);
  return out.str();
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(fmt::format("config: {}", e.what()));
  }
  ExperimentConfig cfg;
  try {
    reject_unknown(j,
                   {"inputs", "synth", "window_seconds", "min_pause_seconds", "split", "seeds", "architectures",
                    "train", "workers", "save_checkpoints", "out"},
                   "config");
    if (j.contains("inputs")) {
      const auto& in = j.at("inputs");
      reject_unknown(in, {"events", "labels", "recording"}, "inputs");
      cfg.inputs = InputFiles{resolve(base_dir, in.at("events").get<std::string>()),
                              resolve(base_dir, in.at("labels").get<std::string>()),
                              resolve(base_dir, in.at("recording").get<std::string>())};
    }
    if (j.contains("synth")) cfg.synth = parse_synth(j.at("synth"));
    read_opt(j, "window_seconds", cfg.window_seconds);
    read_opt(j, "min_pause_seconds", cfg.min_pause_seconds);
    if (j.contains("split")) {
      const auto& s = j.at("split");
      reject_unknown(s, {"train", "val", "test"}, "split");
      read_opt(s, "train", cfg.fractions.train);
      read_opt(s, "val", cfg.fractions.val);
      read_opt(s, "test", cfg.fractions.test);
    }
    read_opt(j, "seeds", cfg.seeds);
    if (j.contains("architectures")) {
      cfg.architectures.clear();
      for (const auto& a : j.at("architectures")) {
        cfg.architectures.push_back(models::architecture_from_string(a.get<std::string>()));
      }
    }
    if (j.contains("train")) {
      const auto& t = j.at("train");
      reject_unknown(t,
                     {"learning_rate", "batch_size", "epochs", "hidden", "beta1", "beta2", "eps", "loss",
                      "lstm_readout"},
                     "train");
      read_opt(t, "learning_rate", cfg.train.learning_rate);
      read_opt(t, "batch_size", cfg.train.batch_size);
      read_opt(t, "epochs", cfg.train.epochs);
      read_opt(t, "hidden", cfg.train.hidden);
      read_opt(t, "beta1", cfg.train.beta1);
      read_opt(t, "beta2", cfg.train.beta2);
      read_opt(t, "eps", cfg.train.eps);
      if (t.contains("loss")) cfg.train.loss = models::loss_from_string(t.at("loss").get<std::string>());
      if (t.contains("lstm_readout")) {
        cfg.train.readout = models::readout_from_string(t.at("lstm_readout").get<std::string>());
      }
    }
    read_opt(j, "workers", cfg.workers);
    read_opt(j, "save_checkpoints", cfg.save_checkpoints);
    if (j.contains("out")) cfg.out = resolve(base_dir, j.at("out").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(fmt::format("config: {}", e.what()));
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

void validate(const ExperimentConfig& cfg) {
  if (!cfg.inputs && !cfg.synth) throw Error("config: either 'inputs' or 'synth' is required");
  if (cfg.seeds.empty()) throw Error("config: at least one seed is required");
  if (cfg.architectures.empty()) throw Error("config: at least one architecture is required");
  const auto& f = cfg.fractions;
  if (!(f.train >= 0.0 && f.val >= 0.0 && f.test >= 0.0)) throw Error("config: split fractions must be non-negative");
  if (std::fabs(f.train + f.val + f.test - 1.0) > 1e-9) throw Error("config: split fractions must sum to 1");
  if (!(cfg.window_seconds > 0.0)) throw Error("config: window_seconds must be positive");
  if (cfg.workers < 1) throw Error("config: workers must be at least 1");
  if (!(cfg.train.learning_rate > 0.0) || cfg.train.batch_size < 1 || cfg.train.epochs < 1 || cfg.train.hidden < 1) {
    throw Error("config: invalid training hyperparameters");
  }
  if (cfg.synth) synth::validate(*cfg.synth);
}

PipelineInputs load_inputs(const ExperimentConfig& cfg) {
  PipelineInputs out;
  if (cfg.inputs) {
    std::ifstream events(cfg.inputs->events);
    if (!events) throw Error("cannot open " + cfg.inputs->events.string());
    out.phrases = segment_phrases(parse_events(events), cfg.min_pause_seconds);
    std::ifstream labels(cfg.inputs->labels);
    if (!labels) throw Error("cannot open " + cfg.inputs->labels.string());
    auto parsed = parse_labels(labels);
    out.labels = std::move(parsed.labels);
    out.warnings = std::move(parsed.warnings);
    std::ifstream rec(cfg.inputs->recording, std::ios::binary);
    if (!rec) throw Error("cannot open " + cfg.inputs->recording.string());
    out.recording = read_recording(rec);
  } else {
    auto data = synth::generate(*cfg.synth);
    out.phrases = segment_phrases(data.events, cfg.min_pause_seconds);
    out.labels = std::move(data.labels);
    out.recording = std::move(data.recording);
  }
  return out;
}

Dataset prepare_dataset(const std::vector<Epoch>& epochs, const ExperimentConfig& cfg, std::uint64_t seed) {
  return standardize(split_dataset(epochs, cfg.fractions, seed));
}

SeedEvaluation evaluate_test_split(const models::Model& model, const Dataset& ds) {
  const auto test = ds.indices(Split::test);
  if (test.empty()) throw Error("test split is empty");
  std::vector<Epoch> test_epochs;
  std::vector<Sentiment> truth;
  for (auto i : test) {
    test_epochs.push_back(ds.epochs[i]);
    truth.push_back(argmax_class(ds.epochs[i].label));
  }
  std::vector<SentimentLabel> train_labels;
  for (auto i : ds.indices(Split::train)) train_labels.push_back(ds.epochs[i].label);

  SeedEvaluation eval;
  eval.predictions = models::predict(model, test_epochs);
  std::vector<Sentiment> predicted;
  for (const auto& p : eval.predictions) predicted.push_back(p.cls);
  eval.confusion = metrics::confusion(truth, predicted);
  eval.accuracy = 100.0 * metrics::accuracy(eval.confusion);
  eval.balanced_accuracy = 100.0 * metrics::balanced_accuracy(eval.confusion);
  eval.majority_baseline = 100.0 * metrics::baselines(train_labels).majority_accuracy;
  return eval;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto inputs = load_inputs(cfg);
  for (const auto& w : inputs.warnings) log::warn(w);
  auto extracted = extract_epochs(inputs.recording, inputs.phrases, inputs.labels, cfg.window_seconds);
  if (extracted.skipped > 0) log::warn(fmt::format("{} phrases start beyond the recording end", extracted.skipped));
  const std::vector<Epoch> epochs = std::move(extracted.epochs);

  ExperimentResult result;
  result.skipped_phrases = extracted.skipped;
  for (auto seed : cfg.seeds) {
    for (auto arch : cfg.architectures) {
      JobResult job;
      job.seed = seed;
      job.arch = arch;
      result.jobs.push_back(std::move(job));
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < result.jobs.size(); i = next++) {
      auto& job = result.jobs[i];
      try {
        const auto ds = prepare_dataset(epochs, cfg, job.seed);
        auto tc = cfg.train;
        tc.arch = job.arch;
        tc.seed = job.seed;
        log::info(fmt::format("training {} seed {}", models::to_string(job.arch), job.seed));
        job.train = models::train(ds, tc, [&](std::size_t epoch, double tl, double vl) {
          log::debug(fmt::format("{} seed {} epoch {}: train {:.6f} val {:.6f}", models::to_string(job.arch),
                                 job.seed, epoch, tl, vl));
        });
        job.eval = evaluate_test_split(job.train.best, ds);
        job.ok = true;
        log::info(fmt::format("{} seed {}: accuracy {:.3f} balanced {:.3f}", models::to_string(job.arch), job.seed,
                              job.eval.accuracy, job.eval.balanced_accuracy));
      } catch (const std::exception& e) {
        job.error = e.what();
        log::error(fmt::format("{} seed {} failed: {}", models::to_string(job.arch), job.seed, e.what()));
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const auto n_workers = std::min(cfg.workers, result.jobs.size());
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }

  std::filesystem::create_directories(cfg.out);
  std::string failures;
  for (const auto& job : result.jobs) {
    if (!job.ok) failures += fmt::format("{}\t{}\t{}\n", job.seed, models::to_string(job.arch), job.error);
  }
  if (!failures.empty()) {
    write_file_atomic(cfg.out / "failures.txt", "seed\tarchitecture\terror\n" + failures);
    throw Error("experiment failed; see " + (cfg.out / "failures.txt").string());
  }

  std::filesystem::create_directories(cfg.out / "curves");
  for (const auto& job : result.jobs) {
    const auto arch = std::string(models::to_string(job.arch));
    result.metrics.push_back({job.seed, arch, job.eval.accuracy, job.eval.balanced_accuracy});
    write_file_atomic(cfg.out / "curves" / fmt::format("{}_seed{}.csv", arch, job.seed),
                      to_text([&](std::ostream& o) { models::write_loss_curve(o, job.train); }));
    if (cfg.save_checkpoints) {
      std::filesystem::create_directories(cfg.out / "checkpoints");
      write_file_atomic(cfg.out / "checkpoints" / fmt::format("{}_seed{}.mpr", arch, job.seed),
                        to_text([&](std::ostream& o) { models::write_checkpoint(o, job.train.best); }));
    }
  }

  // The accuracy baseline is the majority-class share of each seed's train
  // split, averaged over seeds.
  double majority = 0.0;
  std::size_t n_majority = 0;
  for (const auto& job : result.jobs) {
    if (job.arch == cfg.architectures.front()) {
      majority += job.eval.majority_baseline;
      ++n_majority;
    }
  }
  majority /= static_cast<double>(n_majority);
  const double chance = 100.0 / 3.0;

  std::vector<report::SummaryRow> balanced_rows;
  std::vector<std::size_t> balanced_n;
  std::string raincloud = "architecture,seed,balanced_accuracy,baseline\n";
  for (auto arch : cfg.architectures) {
    const auto name = std::string(models::to_string(arch));
    std::vector<double> acc, bal;
    for (const auto& job : result.jobs) {
      if (job.arch != arch) continue;
      acc.push_back(job.eval.accuracy);
      bal.push_back(job.eval.balanced_accuracy);
      raincloud += fmt::format("{},{},{},{}\n", name, job.seed, format_exact(job.eval.balanced_accuracy),
                               format_exact(chance));
    }
    result.summary.push_back(report::summary_row(name, "accuracy", acc, majority));
    result.summary.push_back(report::summary_row(name, "balanced_accuracy", bal, chance));
    balanced_rows.push_back(result.summary.back());
    balanced_n.push_back(bal.size());
  }
  if (balanced_rows.size() == 2 && balanced_n[0] >= 2 && balanced_n[1] >= 2 && balanced_rows[0].sem > 0.0 &&
      balanced_rows[1].sem > 0.0) {
    result.summary.push_back(report::posthoc_row(balanced_rows[0], balanced_n[0], balanced_rows[1], balanced_n[1]));
  }

  write_file_atomic(cfg.out / "metrics.csv",
                    to_text([&](std::ostream& o) { report::write_metrics_csv(o, result.metrics); }));
  write_file_atomic(cfg.out / "summary.csv",
                    to_text([&](std::ostream& o) { report::write_summary_csv(o, result.summary); }));
  write_file_atomic(cfg.out / "raincloud.csv", raincloud);
  write_file_atomic(cfg.out / "report.md", report::render_directory(cfg.out));
  return result;
}

}  // namespace braindec
