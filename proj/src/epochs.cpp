#include "braindec/epochs.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "braindec/error.hpp"
#include "braindec/io_util.hpp"
#include "braindec/rng.hpp"

namespace braindec {
namespace {

constexpr char kRecordingMagic[4] = {'M', 'G', 'R', '1'};
constexpr std::uint32_t kRecordingVersion = 1;

}  // namespace

Recording read_recording(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || !std::equal(magic, magic + 4, kRecordingMagic)) {
    throw Error("not a recording file (bad magic)");
  }
  const auto version = read_le<std::uint32_t>(in, "format version");
  if (version != kRecordingVersion) throw Error(fmt::format("unsupported recording version {}", version));

  Recording rec;
  rec.n_channels = read_le<std::uint32_t>(in, "channel count");
  rec.sample_rate = read_le<double>(in, "sample rate");
  const auto n_samples = read_le<std::uint64_t>(in, "sample count");
  if (rec.n_channels == 0) throw Error("recording has zero channels");
  if (!std::isfinite(rec.sample_rate) || rec.sample_rate <= 0.0) throw Error("recording sample rate must be positive");
  if (n_samples == 0) throw Error("recording has zero samples");

  const std::uint64_t expected = n_samples * rec.n_channels * sizeof(float);
  std::string payload(std::istreambuf_iterator<char>(in), {});
  if (payload.size() != expected) {
    throw Error(fmt::format("expected {} bytes of samples, found {}", expected, payload.size()));
  }
  rec.samples.resize(n_samples * rec.n_channels);
  const auto* bytes = reinterpret_cast<const unsigned char*>(payload.data());
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    const float v = decode_le<float>(bytes + i * sizeof(float));
    if (!std::isfinite(v)) {
      throw Error(fmt::format("non-finite sample at index {} (sample {}, channel {})", i, i / rec.n_channels,
                              i % rec.n_channels));
    }
    rec.samples[i] = v;
  }
  return rec;
}

void write_recording(std::ostream& out, const Recording& rec) {
  if (rec.n_channels == 0 || rec.samples.size() % rec.n_channels != 0) {
    throw Error("recording sample buffer does not match channel count");
  }
  out.write(kRecordingMagic, 4);
  write_le<std::uint32_t>(out, kRecordingVersion);
  write_le<std::uint32_t>(out, rec.n_channels);
  write_le<double>(out, rec.sample_rate);
  write_le<std::uint64_t>(out, rec.n_samples());
  for (float v : rec.samples) write_le<float>(out, v);
}

std::int64_t seconds_to_sample(double seconds, double sample_rate) { return std::llround(seconds * sample_rate); }

ExtractResult extract_epochs(const Recording& rec, const std::vector<Phrase>& phrases,
                             const std::vector<SentimentLabel>& labels, double window_seconds) {
  if (!(window_seconds > 0.0)) throw Error("window length must be positive");
  std::map<std::int64_t, const SentimentLabel*> by_id;
  for (const auto& l : labels) by_id[l.phrase_id] = &l;

  const auto window = seconds_to_sample(window_seconds, rec.sample_rate);
  if (window < 1) throw Error("window shorter than one sample");
  const auto n_samples = static_cast<std::int64_t>(rec.n_samples());
  const auto channels = static_cast<Eigen::Index>(rec.n_channels);

  ExtractResult out;
  for (const auto& phrase : phrases) {
    const auto it = by_id.find(phrase.id);
    if (it == by_id.end()) throw Error(fmt::format("no label for phrase {}", phrase.id));
    const auto start = seconds_to_sample(phrase.onset, rec.sample_rate);
    if (start >= n_samples) {
      ++out.skipped;
      continue;
    }
    Epoch ep;
    ep.phrase_id = phrase.id;
    ep.label = *it->second;
    ep.data = SignalMatrix::Zero(window, channels);
    const auto available = std::min<std::int64_t>(window, n_samples - start);
    for (std::int64_t t = 0; t < available; ++t) {
      for (Eigen::Index c = 0; c < channels; ++c) {
        ep.data(t, c) = rec.at(static_cast<std::uint64_t>(start + t), static_cast<std::uint32_t>(c));
      }
    }
    out.epochs.push_back(std::move(ep));
  }
  return out;
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "unknown";
}

Split split_from_string(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "val") return Split::val;
  if (name == "test") return Split::test;
  throw Error(fmt::format("unknown split '{}'", name));
}

SplitSizes split_sizes(std::size_t n, const SplitFractions& f) {
  if (f.train < 0 || f.val < 0 || f.test < 0 || std::fabs(f.train + f.val + f.test - 1.0) > 1e-9) {
    throw Error("split fractions must be non-negative and sum to 1");
  }
  // The epsilon keeps products such as 0.29 * 100 = 28.999999999999996 from flooring down.
  SplitSizes s;
  s.train = static_cast<std::size_t>(std::floor(f.train * static_cast<double>(n) + 1e-9));
  s.val = static_cast<std::size_t>(std::floor(f.val * static_cast<double>(n) + 1e-9));
  s.train = std::min(s.train, n);
  s.val = std::min(s.val, n - s.train);
  s.test = n - s.train - s.val;
  return s;
}

std::vector<Split> assign_splits(std::size_t n, const SplitFractions& fractions, std::uint64_t seed) {
  const auto sizes = split_sizes(n, fractions);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  SplitMix64 rng(seed);
  for (std::size_t i = n; i-- > 1;) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<Split> out(n, Split::test);
  for (std::size_t k = 0; k < n; ++k) {
    if (k < sizes.train) {
      out[order[k]] = Split::train;
    } else if (k < sizes.train + sizes.val) {
      out[order[k]] = Split::val;
    }
  }
  return out;
}

std::vector<std::size_t> Dataset::indices(Split which) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (split[i] == which) out.push_back(i);
  }
  return out;
}

Split Dataset::split_of(std::int64_t phrase_id) const {
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    if (epochs[i].phrase_id == phrase_id) return split[i];
  }
  throw Error(fmt::format("phrase {} is not in the dataset", phrase_id));
}

Dataset split_dataset(std::vector<Epoch> epochs, const SplitFractions& fractions, std::uint64_t seed) {
  if (epochs.size() < 10) throw Error(fmt::format("need at least 10 epochs to split, have {}", epochs.size()));
  Dataset ds;
  ds.split = assign_splits(epochs.size(), fractions, seed);
  ds.epochs = std::move(epochs);
  ds.seed = seed;
  return ds;
}

ChannelStats channel_stats(const Dataset& ds) {
  const auto train = ds.indices(Split::train);
  if (train.empty()) throw Error("cannot standardize: train split is empty");
  const auto channels = ds.epochs[train.front()].data.cols();
  ChannelStats stats;
  stats.mean.assign(static_cast<std::size_t>(channels), 0.0);
  stats.std.assign(static_cast<std::size_t>(channels), 0.0);
  double count = 0.0;
  for (auto i : train) {
    const auto& d = ds.epochs[i].data;
    for (Eigen::Index c = 0; c < channels; ++c) stats.mean[c] += d.col(c).sum();
    count += static_cast<double>(d.rows());
  }
  for (auto& m : stats.mean) m /= count;
  for (auto i : train) {
    const auto& d = ds.epochs[i].data;
    for (Eigen::Index c = 0; c < channels; ++c) {
      stats.std[c] += (d.col(c).array() - stats.mean[c]).square().sum();
    }
  }
  for (auto& s : stats.std) s = std::sqrt(s / count);
  return stats;
}

Dataset standardize(Dataset ds) {
  auto stats = channel_stats(ds);
  const auto channels = static_cast<Eigen::Index>(stats.mean.size());
  Eigen::RowVectorXd mean(channels), scale(channels);
  for (Eigen::Index c = 0; c < channels; ++c) {
    mean[c] = stats.mean[c];
    scale[c] = 1.0 / (stats.std[c] + kStdGuard);
  }
  for (auto& ep : ds.epochs) {
    if (ep.data.cols() != channels) throw Error("epochs disagree on channel count");
    ep.data = ((ep.data.rowwise() - mean).array().rowwise() * scale.array()).matrix();
  }
  ds.standardization = std::move(stats);
  return ds;
}

SignalMatrix unstandardize(const SignalMatrix& data, const ChannelStats& stats) {
  SignalMatrix out = data;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    out.col(c) = (out.col(c).array() * (stats.std[c] + kStdGuard) + stats.mean[c]).matrix();
  }
  return out;
}

void write_manifest(std::ostream& out, const Dataset& ds) {
  out << "phrase_id\tsplit\n";
  for (std::size_t i = 0; i < ds.epochs.size(); ++i) {
    out << ds.epochs[i].phrase_id << '\t' << to_string(ds.split[i]) << '\n';
  }
}

std::vector<std::pair<std::int64_t, Split>> parse_manifest(std::istream& in) {
  std::string line;
  if (!read_line(in, line) || line != "phrase_id\tsplit") throw Error("line 1: expected manifest header");
  std::vector<std::pair<std::int64_t, Split>> out;
  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2) throw Error(fmt::format("line {}: expected 2 columns", line_no));
    out.emplace_back(parse_int(fields[0], "phrase_id", line_no), split_from_string(fields[1]));
  }
  return out;
}

void write_channel_stats(std::ostream& out, const ChannelStats& stats) {
  out << "channel\tmean\tstd\n";
  for (std::size_t c = 0; c < stats.mean.size(); ++c) {
    out << c << '\t' << format_exact(stats.mean[c]) << '\t' << format_exact(stats.std[c]) << '\n';
  }
}

}  // namespace braindec
