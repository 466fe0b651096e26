#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "braindec/labels.hpp"
#include "braindec/transcript.hpp"

namespace braindec {

/// Time-major [samples x channels] block, as in the recording file.
using SignalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A continuous multichannel recording. Samples are stored exactly as in the
/// binary format (f32, time-major).
struct Recording {
  std::uint32_t n_channels = 0;
  double sample_rate = 0.0;
  std::vector<float> samples;  // n_samples * n_channels

  std::uint64_t n_samples() const { return n_channels == 0 ? 0 : samples.size() / n_channels; }
  float at(std::uint64_t sample, std::uint32_t channel) const { return samples[sample * n_channels + channel]; }
  float& at(std::uint64_t sample, std::uint32_t channel) { return samples[sample * n_channels + channel]; }
};

/// Recording file: "MGR1", u32 version (1), u32 n_channels, f64 sample_rate,
/// u64 n_samples, then f32 samples, all little-endian.
Recording read_recording(std::istream& in);
void write_recording(std::ostream& out, const Recording& rec);

struct Epoch {
  std::int64_t phrase_id = 0;
  SignalMatrix data;  // T x C
  SentimentLabel label;
};

/// Sample index of a time in seconds: round(seconds * sample_rate).
std::int64_t seconds_to_sample(double seconds, double sample_rate);

struct ExtractResult {
  std::vector<Epoch> epochs;
  std::size_t skipped = 0;  // phrases starting at or beyond the recording end
};

/// Cuts [onset, onset + window) for each phrase; zero-pads past the end.
ExtractResult extract_epochs(const Recording& rec, const std::vector<Phrase>& phrases,
                             const std::vector<SentimentLabel>& labels, double window_seconds);

enum class Split : std::uint8_t { train, val, test };
std::string_view to_string(Split s);
Split split_from_string(std::string_view name);

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct SplitSizes {
  std::size_t train = 0, val = 0, test = 0;
};

/// floor(train * n), floor(val * n), remainder to test.
SplitSizes split_sizes(std::size_t n, const SplitFractions& fractions);

/// Fisher-Yates over positions 0..n-1 driven by SplitMix64(seed): for
/// i = n-1 down to 1, swap position i with SplitMix64::below(i + 1). The first
/// sizes.train shuffled positions are train, the next sizes.val are val, the
/// rest test. Returns the split of each original position.
std::vector<Split> assign_splits(std::size_t n, const SplitFractions& fractions, std::uint64_t seed);

struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> std;
};

inline constexpr double kStdGuard = 1e-8;

struct Dataset {
  std::vector<Epoch> epochs;
  std::vector<Split> split;  // parallel to epochs
  std::optional<ChannelStats> standardization;
  std::uint64_t seed = 0;

  std::vector<std::size_t> indices(Split which) const;
  Split split_of(std::int64_t phrase_id) const;
};

/// Requires at least 10 epochs.
Dataset split_dataset(std::vector<Epoch> epochs, const SplitFractions& fractions, std::uint64_t seed);

/// Per-channel mean/std (population) over all train samples.
ChannelStats channel_stats(const Dataset& ds);

/// x -> (x - mean_c) / (std_c + 1e-8) for every epoch, with train-only stats.
Dataset standardize(Dataset ds);

/// Inverse of the standardizing transform for one epoch.
SignalMatrix unstandardize(const SignalMatrix& data, const ChannelStats& stats);

/// Manifest: header `phrase_id\tsplit`.
void write_manifest(std::ostream& out, const Dataset& ds);
std::vector<std::pair<std::int64_t, Split>> parse_manifest(std::istream& in);

void write_channel_stats(std::ostream& out, const ChannelStats& stats);

}  // namespace braindec
