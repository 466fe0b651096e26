#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "braindec/epochs.hpp"
#include "braindec/error.hpp"
#include "braindec/io_util.hpp"
#include "braindec/labels.hpp"
#include "braindec/synth.hpp"
#include "braindec/transcript.hpp"
#include "oracles.hpp"

using namespace braindec;
using namespace braindec::synth;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("braindec_synth_" + name);
  fs::remove_all(p);
  return p;
}

double matched_filter_accuracy(const SynthData& d, double window) {
  auto phrases = segment_phrases(d.events);
  auto ex = extract_epochs(d.recording, phrases, d.labels, window);
  std::size_t hits = 0;
  for (const auto& e : ex.epochs)
    hits += oracle::matched_filter(e.data, d.recording.sample_rate) == d.truth[static_cast<std::size_t>(e.phrase_id)];
  return static_cast<double>(hits) / static_cast<double>(ex.epochs.size());
}

}  // namespace

TEST_CASE("template design") {
  CHECK(class_frequency(Sentiment::neutral) == 4.0);
  CHECK(class_frequency(Sentiment::positive) == 10.0);
  CHECK(class_frequency(Sentiment::negative) == 20.0);
  CHECK(class_channels(Sentiment::positive, 16) == std::vector<std::uint32_t>{4, 5, 6, 7});
  CHECK(class_channels(Sentiment::negative, 3) == std::vector<std::uint32_t>{2});
  CHECK(template_value(Sentiment::neutral, 2.0, 0, 250.0) == 0.0);
  CHECK(template_value(Sentiment::neutral, 2.0, 125 / 8, 250.0) ==
        doctest::Approx(2.0 * std::sin(2 * M_PI * 4.0 * 15 / 250.0)));
}

TEST_CASE("config validation") {
  SynthConfig c;
  c.n_phrases = 9;
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  c.class_priors = {0.5, 0.5, 0.1};
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  c.snr = -1;
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  c.min_words = 0;
  CHECK_THROWS_AS(validate(c), Error);
  CHECK_NOTHROW(validate(SynthConfig{}));
}

TEST_CASE("generated files parse cleanly and are deterministic") {
  SynthConfig c;
  c.n_phrases = 40;
  c.n_channels = 4;
  c.seed = 11;
  auto a = scratch("a"), b = scratch("b");
  write_synth(a, generate(c));
  write_synth(b, generate(c));
  for (auto name : {"events.tsv", "labels.tsv", "recording.mgr", "truth.csv"}) {
    CHECK(read_file(a / name) == read_file(b / name));
  }

  std::ifstream ev(a / "events.tsv");
  auto events = parse_events(ev);
  auto phrases = segment_phrases(events);
  CHECK(phrases.size() == 40);
  std::ifstream lab(a / "labels.tsv");
  auto labels = parse_labels(lab);
  CHECK(labels.warnings.empty());
  CHECK(labels.labels.size() == 40);
  std::ifstream rec_in(a / "recording.mgr", std::ios::binary);
  auto rec = read_recording(rec_in);
  CHECK(rec.n_channels == 4);
  auto ex = extract_epochs(rec, phrases, labels.labels, c.window_seconds);
  CHECK(ex.skipped == 0);
  CHECK(ex.epochs.size() == 40);

  c.seed = 12;
  write_synth(b, generate(c));
  CHECK(read_file(a / "recording.mgr") != read_file(b / "recording.mgr"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("labels peak on the true class") {
  SynthConfig c;
  c.n_phrases = 50;
  c.n_channels = 4;
  auto d = generate(c);
  REQUIRE(d.truth.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(argmax_class(d.labels[i]) == d.truth[i]);
    CHECK(d.labels[i].probs[static_cast<std::size_t>(d.truth[i])] == 0.8);
  }
}

TEST_CASE("class frequencies follow the priors") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SynthConfig c;
    c.n_phrases = 2000;
    c.n_channels = 4;
    c.sample_rate = 50;
    c.window_seconds = 0.5;
    c.seed = seed;
    auto d = generate(c);
    for (int k = 0; k < 3; ++k) {
      const double p = c.class_priors[static_cast<std::size_t>(k)];
      const double n = static_cast<double>(c.n_phrases);
      const double count = static_cast<double>(std::count(d.truth.begin(), d.truth.end(), static_cast<Sentiment>(k)));
      CHECK(std::fabs(count - n * p) <= 3.0 * std::sqrt(n * p * (1 - p)));
    }
  }
}

TEST_CASE("phrases are spaced at least a window apart") {
  SynthConfig c;
  c.n_phrases = 100;
  c.n_channels = 4;
  auto d = generate(c);
  auto ph = segment_phrases(d.events);
  REQUIRE(ph.size() == 100);
  for (std::size_t i = 1; i < ph.size(); ++i) CHECK(ph[i].onset - ph[i - 1].onset >= c.window_seconds);
  const double duration = static_cast<double>(d.recording.n_samples()) / c.sample_rate;
  CHECK(ph.back().onset + c.window_seconds <= duration);
}

TEST_CASE("matched filter recovers classes at high snr") {
  SynthConfig c;
  c.n_phrases = 600;
  c.class_priors = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  c.snr = 5;
  c.seed = 3;
  CHECK(matched_filter_accuracy(generate(c), c.window_seconds) >= 0.99);
}

TEST_CASE("matched filter is at chance without signal") {
  SynthConfig c;
  c.n_phrases = 600;
  c.class_priors = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  c.snr = 0;
  c.seed = 3;
  auto d = generate(c);
  const double acc = matched_filter_accuracy(d, c.window_seconds);
  // binomial 99.9% band around 1/3 for 600 trials
  CHECK(std::fabs(acc - 1.0 / 3) < 3.3 * std::sqrt((1.0 / 3) * (2.0 / 3) / 600));

  // same seed with signal: the noise stream is shared, so the difference is exactly the template
  c.snr = 1;
  auto with_signal = generate(c);
  CHECK(with_signal.truth == d.truth);
  CHECK(with_signal.events == d.events);
  REQUIRE(with_signal.recording.samples.size() == d.recording.samples.size());
  bool any_diff = false;
  for (std::size_t i = 0; i < d.recording.samples.size(); ++i) any_diff |= with_signal.recording.samples[i] != d.recording.samples[i];
  CHECK(any_diff);
}
