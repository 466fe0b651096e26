#include "braindec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "braindec/error.hpp"
#include "braindec/io_util.hpp"
#include "braindec/rng.hpp"

namespace braindec::synth {
namespace {

constexpr std::uint64_t kClassStream = 0xC1A55;
constexpr std::uint64_t kTimingStream = 0x7191;
constexpr std::uint64_t kNoiseStream = 0x401535;

constexpr std::array<std::string_view, 24> kVocabulary = {
    "the",   "holmes", "watson", "said",  "door",   "street", "letter", "night", "man",     "woman",   "case",  "baker",
    "house", "window", "clock",  "quiet", "friend", "wrote",  "cried",  "smile", "evening", "strange", "light", "heard"};

// Seconds on a microsecond grid, as written to the events file.
double sample_to_seconds(std::int64_t sample, double fs) {
  return std::round(static_cast<double>(sample) / fs * 1e6) / 1e6;
}

std::int64_t uniform_samples(SplitMix64& rng, double lo_s, double hi_s, double fs) {
  const auto lo = std::llround(lo_s * fs);
  const auto hi = std::llround(hi_s * fs);
  return lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

Sentiment draw_class(SplitMix64& rng, const Probs& priors) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (int k = 0; k < kNumClasses - 1; ++k) {
    cumulative += priors[k];
    if (u < cumulative) return static_cast<Sentiment>(k);
  }
  return static_cast<Sentiment>(kNumClasses - 1);
}

}  // namespace

void validate(const SynthConfig& cfg) {
  if (cfg.n_phrases < 10) throw Error("synth: need at least 10 phrases");
  double sum = 0.0;
  for (double p : cfg.class_priors) {
    if (!(p >= 0.0)) throw Error("synth: class priors must be non-negative");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-9) throw Error(fmt::format("synth: class priors sum to {}, not 1", sum));
  if (!(cfg.snr >= 0.0) || !std::isfinite(cfg.snr)) throw Error("synth: snr must be finite and non-negative");
  if (!(cfg.sample_rate > 0.0)) throw Error("synth: sample rate must be positive");
  if (cfg.n_channels < 3) throw Error("synth: need at least 3 channels");
  if (!(cfg.window_seconds > 0.0)) throw Error("synth: window must be positive");
  if (cfg.min_words < 1 || cfg.max_words < cfg.min_words) throw Error("synth: invalid words-per-phrase range");
}

double class_frequency(Sentiment cls) {
  constexpr std::array<double, kNumClasses> kFrequencies = {4.0, 10.0, 20.0};
  return kFrequencies[static_cast<int>(cls)];
}

std::vector<std::uint32_t> class_channels(Sentiment cls, std::uint32_t n_channels) {
  const std::uint32_t quarter = std::max<std::uint32_t>(1, n_channels / 4);
  std::vector<std::uint32_t> out;
  const auto first = static_cast<std::uint32_t>(cls) * quarter;
  for (std::uint32_t c = first; c < first + quarter && c < n_channels; ++c) out.push_back(c);
  return out;
}

double template_value(Sentiment cls, double snr, std::size_t t, double sample_rate) {
  return snr * std::sin(2.0 * std::numbers::pi * class_frequency(cls) * static_cast<double>(t) / sample_rate);
}

SynthData generate(const SynthConfig& cfg) {
  validate(cfg);
  const double fs = cfg.sample_rate;
  const auto window = std::llround(cfg.window_seconds * fs);
  const auto gap = std::llround(0.25 * fs);

  SplitMix64 class_rng(derive_seed(cfg.seed, kClassStream));
  SplitMix64 timing_rng(derive_seed(cfg.seed, kTimingStream));

  SynthData data;
  std::vector<std::int64_t> starts;
  std::int64_t cursor = std::llround(0.5 * fs);
  for (std::size_t i = 0; i < cfg.n_phrases; ++i) {
    const auto cls = draw_class(class_rng, cfg.class_priors);
    const auto words = cfg.min_words + timing_rng.below(cfg.max_words - cfg.min_words + 1);
    const auto start = cursor;
    for (std::size_t w = 0; w < words; ++w) {
      const auto dur = uniform_samples(timing_rng, 0.2, 0.45, fs);
      Event ev;
      ev.onset = sample_to_seconds(cursor, fs);
      ev.duration = sample_to_seconds(dur, fs);
      ev.kind = EventKind::word;
      ev.token = std::string(kVocabulary[timing_rng.below(kVocabulary.size())]);
      data.events.push_back(std::move(ev));
      cursor += dur;
    }
    const auto pause = std::max<std::int64_t>(uniform_samples(timing_rng, 0.15, 0.4, fs), start + window + gap - cursor);
    Event sp;
    sp.onset = sample_to_seconds(cursor, fs);
    sp.duration = sample_to_seconds(pause, fs);
    sp.kind = EventKind::pause;
    data.events.push_back(std::move(sp));
    cursor += pause;

    SentimentLabel label;
    label.phrase_id = static_cast<std::int64_t>(i);
    label.probs.fill(0.1);
    label.probs[static_cast<int>(cls)] = 0.8;
    data.labels.push_back(label);
    data.truth.push_back(cls);
    starts.push_back(start);
  }

  const auto n_samples = cursor + std::llround(0.5 * fs);
  auto& rec = data.recording;
  rec.n_channels = cfg.n_channels;
  rec.sample_rate = fs;
  std::vector<double> signal(static_cast<std::size_t>(n_samples) * cfg.n_channels);
  GaussianSource noise(derive_seed(cfg.seed, kNoiseStream));
  for (auto& v : signal) v = noise.next();
  if (cfg.snr > 0.0) {
    for (std::size_t i = 0; i < starts.size(); ++i) {
      const auto channels = class_channels(data.truth[i], cfg.n_channels);
      for (std::int64_t t = 0; t < window; ++t) {
        const double value = template_value(data.truth[i], cfg.snr, static_cast<std::size_t>(t), fs);
        const auto row = static_cast<std::size_t>(starts[i] + t) * cfg.n_channels;
        for (auto c : channels) signal[row + c] += value;
      }
    }
  }
  rec.samples.resize(signal.size());
  std::transform(signal.begin(), signal.end(), rec.samples.begin(), [](double v) { return static_cast<float>(v); });
  return data;
}

void write_synth(const std::filesystem::path& dir, const SynthData& data) {
  std::filesystem::create_directories(dir);
  std::ostringstream events, labels, recording(std::ios::binary), truth;
  write_events(events, data.events);
  write_labels(labels, data.labels);
  write_recording(recording, data.recording);
  truth << "phrase_id,true_class\n";
  for (std::size_t i = 0; i < data.truth.size(); ++i) truth << data.labels[i].phrase_id << ',' << to_string(data.truth[i]) << '\n';
  write_file_atomic(dir / "events.tsv", events.str());
  write_file_atomic(dir / "labels.tsv", labels.str());
  write_file_atomic(dir / "recording.mgr", recording.str());
  write_file_atomic(dir / "truth.csv", truth.str());
}

}  // namespace braindec::synth
