#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "braindec/error.hpp"
#include "braindec/experiment.hpp"
#include "braindec/io_util.hpp"
#include "braindec/report.hpp"
#include "oracles.hpp"

using namespace braindec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("braindec_experiment_" + name);
  fs::remove_all(p);
  return p;
}

// Small enough to train 2 x 10 models in seconds; short training keeps the
// per-seed scores spread out.
ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig cfg;
  synth::SynthConfig s;
  s.n_phrases = 120;
  s.class_priors = {0.5, 0.25, 0.25};
  s.snr = 3.0;
  s.sample_rate = 50.0;
  s.n_channels = 4;
  s.window_seconds = 0.6;
  s.seed = 1;
  cfg.synth = s;
  cfg.window_seconds = 0.6;
  cfg.train.epochs = 3;
  cfg.train.hidden = 8;
  cfg.train.learning_rate = 3e-3;
  cfg.out = out;
  return cfg;
}

std::vector<std::string> listing(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), dir).string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("config defaults and strictness") {
  auto cfg = parse_config(R"({"synth": {"n_phrases": 50}})");
  CHECK(cfg.seeds.size() == 10);
  CHECK(cfg.architectures.size() == 2);
  CHECK(cfg.window_seconds == 2.0);
  CHECK(cfg.train.learning_rate == 1e-4);
  CHECK(cfg.train.batch_size == 32);
  CHECK(cfg.train.epochs == 200);
  CHECK(cfg.fractions.train == 0.8);
  REQUIRE(cfg.synth);
  CHECK(cfg.synth->n_phrases == 50);

  CHECK_THROWS_AS(parse_config(R"({"synth": {}, "windw_seconds": 1})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"synth": {"snr": 1, "bogus": 2}})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"synth": {}, "train": {"lr": 1}})"), Error);
  CHECK_THROWS_AS(parse_config("{not json"), Error);
  CHECK_THROWS_AS(validate(parse_config(R"({"synth": {}, "seeds": []})")), Error);
  CHECK_THROWS_AS(validate(parse_config(R"({"synth": {}, "architectures": []})")), Error);
  CHECK_THROWS_AS(validate(parse_config(R"({"synth": {}, "split": {"train": 0.8, "val": 0.1, "test": 0.2}})")), Error);
  CHECK_THROWS_AS(validate(parse_config(R"({})")), Error);
  CHECK_THROWS_AS(validate(parse_config(R"({"synth": {}, "split": {"train": 1.1, "val": -0.1, "test": 0.0}})")), Error);

  auto rel = parse_config(R"({"inputs": {"events": "e.tsv", "labels": "l.tsv", "recording": "r.mgr"}})", "/data/x");
  REQUIRE(rel.inputs);
  CHECK(rel.inputs->events == fs::path("/data/x/e.tsv"));
}

TEST_CASE("experiment output shape, determinism and worker independence") {
  const auto a = scratch("a"), b = scratch("b"), c = scratch("c");
  auto cfg = small_config(a);
  auto result = run_experiment(cfg);

  CHECK(result.metrics.size() == 20);
  REQUIRE(result.summary.size() == 5);
  int arch_rows = 0;
  for (const auto& row : result.summary) {
    if (row.metric == report::kPosthocMetric) {
      CHECK(row.architecture == "mlp_vs_lstm");
      continue;
    }
    ++arch_rows;
    CHECK(std::isfinite(row.mean));
    CHECK(std::isfinite(row.sem));
    CHECK(std::isfinite(row.t));
    CHECK(std::isfinite(row.p));
  }
  CHECK(arch_rows == 4);
  CHECK(result.summary.back().metric == report::kPosthocMetric);

  std::ifstream rc(a / "raincloud.csv");
  std::string line;
  std::getline(rc, line);
  CHECK(line == "architecture,seed,balanced_accuracy,baseline");
  int rows = 0;
  while (std::getline(rc, line)) {
    ++rows;
    CHECK(line.substr(line.rfind(',') + 1) == format_exact(100.0 / 3.0));
  }
  CHECK(rows == 20);

  cfg.out = b;
  run_experiment(cfg);
  cfg.out = c;
  cfg.workers = 3;
  run_experiment(cfg);
  const auto files = listing(a);
  CHECK(files == listing(b));
  CHECK(files == listing(c));
  CHECK(std::find(files.begin(), files.end(), "report.md") != files.end());
  CHECK(std::find(files.begin(), files.end(), "curves/lstm_seed9.csv") != files.end());
  for (const auto& f : files) {
    INFO(f);
    CHECK(read_file(a / f) == read_file(b / f));
    CHECK(read_file(a / f) == read_file(c / f));
  }

  // the report only reformats CSV values
  std::ifstream sin(a / "summary.csv");
  const auto summary = report::parse_summary_csv(sin);
  const auto md = read_file(a / "report.md");
  for (const auto& row : summary) {
    CHECK(md.find(report::format_value(row.mean)) != std::string::npos);
    if (row.metric != report::kPosthocMetric) CHECK(md.find(report::format_value(row.sem)) != std::string::npos);
    CHECK(md.find(report::format_p(row.p)) != std::string::npos);
  }
  for (const auto& p : {a, b, c}) fs::remove_all(p);
}

TEST_CASE("a failing stage fails the experiment and records it") {
  const auto out = scratch("fail");
  auto cfg = small_config(out);
  cfg.fractions = {0.9, 0.0, 0.1};
  cfg.seeds = {0, 1};
  CHECK_THROWS_AS(run_experiment(cfg), Error);
  CHECK(fs::exists(out / "failures.txt"));
  CHECK_FALSE(fs::exists(out / "summary.csv"));
  fs::remove_all(out);
}

TEST_CASE("test split evaluation matches a recount") {
  auto cfg = small_config(scratch("unused"));
  auto inputs = load_inputs(cfg);
  auto ex = extract_epochs(inputs.recording, inputs.phrases, inputs.labels, cfg.window_seconds);
  auto ds = prepare_dataset(ex.epochs, cfg, 4);
  auto model = models::init_model({models::Architecture::mlp, 30, 4, 8}, 2);
  auto ev = evaluate_test_split(model, ds);
  const auto test = ds.indices(Split::test);
  REQUIRE(ev.predictions.size() == test.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < test.size(); ++i)
    hits += ev.predictions[i].cls == argmax_class(ds.epochs[test[i]].label);
  CHECK(ev.accuracy == doctest::Approx(100.0 * static_cast<double>(hits) / static_cast<double>(test.size())).epsilon(1e-12));
  std::size_t neutral = 0;
  const auto train = ds.indices(Split::train);
  for (auto i : train) neutral += argmax_class(ds.epochs[i].label) == Sentiment::neutral;
  CHECK(ev.majority_baseline >= 100.0 * static_cast<double>(neutral) / static_cast<double>(train.size()));
}

TEST_CASE("published summary statistics replayed through the report path") {
  const auto dir = scratch("posthoc");
  fs::create_directories(dir);
  report::SummaryRow mlp{"mlp", "balanced_accuracy", 35.878, 0.335, 0, 0, 100.0 / 3};
  report::SummaryRow lstm{"lstm", "balanced_accuracy", 35.745, 0.245, 0, 0, 100.0 / 3};
  auto post = report::posthoc_row(mlp, 10, lstm, 10);
  CHECK(std::fabs(post.t - 0.321) <= 1e-3);
  CHECK(std::fabs(post.p - 0.752) <= 1e-3);
  CHECK(post.mean == doctest::Approx(0.133).epsilon(1e-12));
  {
    std::ofstream out(dir / "summary.csv");
    report::write_summary_csv(out, {mlp, lstm, post});
  }
  const auto md = report::render_directory(dir);
  CHECK(md.find("t = " + report::format_value(post.t)) != std::string::npos);
  CHECK(md.find("0.752") != std::string::npos);
  std::ifstream in(dir / "summary.csv");
  auto back = report::parse_summary_csv(in);
  REQUIRE(back.size() == 3);
  CHECK(back[2].t == post.t);
  CHECK(back[2].p == post.p);
  fs::remove_all(dir);
}

TEST_CASE("empty metrics directory") {
  const auto dir = scratch("empty");
  fs::create_directories(dir);
  try {
    report::render_directory(dir);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("no metrics found") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("model comparison row against the oracles") {
  std::vector<SentimentLabel> labels;
  std::vector<HumanAnnotation> ann;
  const std::vector<Probs> p{{0.7, 0.2, 0.1}, {0.1, 0.8, 0.1}, {0.5, 0.3, 0.2}, {0.9, 0.05, 0.05},
                             {0.2, 0.2, 0.6}, {0.6, 0.3, 0.1}, {0.3, 0.1, 0.6}, {0.4, 0.5, 0.1}};
  const std::vector<std::array<std::int64_t, 3>> n{{3, 1, 1}, {0, 4, 1}, {2, 2, 1}, {5, 0, 0},
                                                   {1, 1, 3}, {4, 1, 0}, {2, 0, 3}, {3, 2, 0}};
  for (int i = 0; i < 8; ++i) labels.push_back({i, p[static_cast<std::size_t>(i)]});
  for (int i = 0; i < 6; ++i) ann.push_back({i, n[static_cast<std::size_t>(i)]});
  auto row = report::compare_model("m", labels, ann);
  // proportions over all eight labels: argmaxes n p n n g n g p
  CHECK(row.percent[0] == doctest::Approx(50.0));
  CHECK(row.percent[1] == doctest::Approx(25.0));
  CHECK(row.percent[2] == doctest::Approx(25.0));
  double rho = 0, pv = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < 6; ++i) {
      x.push_back(p[i][k]);
      y.push_back(static_cast<double>(n[i][k]));
    }
    auto ref = oracle::spearman(x, y);
    rho += ref.statistic / 3;
    pv += ref.p / 3;
  }
  CHECK(row.rho == doctest::Approx(rho).epsilon(1e-12));
  CHECK(row.p == doctest::Approx(pv).epsilon(1e-9));
}

TEST_CASE("csv round trips") {
  std::vector<report::MetricsRow> m{{0, "mlp", 81.25, 35.1234567891}, {1, "lstm", 1.0 / 3, 2.0 / 3}};
  std::ostringstream a;
  report::write_metrics_csv(a, m);
  std::istringstream in(a.str());
  auto back = report::parse_metrics_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[1].accuracy == 1.0 / 3);
  std::ostringstream b;
  report::write_metrics_csv(b, back);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("seed,architecture,accuracy,balanced_accuracy\n", 0) == 0);
}
