#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "braindec/epochs.hpp"
#include "braindec/labels.hpp"
#include "braindec/transcript.hpp"

namespace braindec::synth {

struct SynthConfig {
  std::size_t n_phrases = 600;
  Probs class_priors{0.85, 0.07, 0.08};
  double snr = 1.0;  // sinusoid amplitude over unit noise std
  double sample_rate = 250.0;
  std::uint32_t n_channels = 16;
  double window_seconds = 2.0;
  std::size_t min_words = 2;
  std::size_t max_words = 6;
  std::uint64_t seed = 0;
};

void validate(const SynthConfig& cfg);

/// Class k injects a sinusoid of this frequency (4, 10, 20 Hz).
double class_frequency(Sentiment cls);

/// Channels [k*q, (k+1)*q) with q = max(1, n_channels / 4) for class k.
std::vector<std::uint32_t> class_channels(Sentiment cls, std::uint32_t n_channels);

/// snr * sin(2 pi f_k t / fs) for sample t of the window.
double template_value(Sentiment cls, double snr, std::size_t t, double sample_rate);

struct SynthData {
  std::vector<Event> events;
  std::vector<SentimentLabel> labels;  // one per phrase, ids 0..n-1
  Recording recording;
  std::vector<Sentiment> truth;        // per phrase
};

/// Phrases are laid end to end with a pause event after each one, spaced so
/// that consecutive windows never overlap. Each phrase gets a class drawn
/// from the priors and a label of 0.8 on that class and 0.1 elsewhere. The
/// recording is unit Gaussian noise plus, inside each phrase's window, the
/// class template on the class's channels. Class draws, timing/text and noise
/// come from separate SplitMix64 streams derived from `seed`.
SynthData generate(const SynthConfig& cfg);

/// Writes events.tsv, labels.tsv, recording.mgr and truth.csv into `dir`.
void write_synth(const std::filesystem::path& dir, const SynthData& data);

}  // namespace braindec::synth
