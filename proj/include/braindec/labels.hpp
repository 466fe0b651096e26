#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "braindec/stats.hpp"

namespace braindec {

/// Class order used everywhere: neutral, positive, negative.
enum class Sentiment : int { neutral = 0, positive = 1, negative = 2 };
inline constexpr int kNumClasses = 3;

std::string_view to_string(Sentiment s);
Sentiment sentiment_from_string(std::string_view name);

using Probs = std::array<double, kNumClasses>;

struct SentimentLabel {
  std::int64_t phrase_id = 0;
  Probs probs{};  // neutral, positive, negative

  friend bool operator==(const SentimentLabel&, const SentimentLabel&) = default;
};

struct HumanAnnotation {
  std::int64_t phrase_id = 0;
  std::array<std::int64_t, kNumClasses> counts{};
};

struct ClassProportions {
  Probs percent{};  // neutral, positive, negative; sums to 100
};

struct LabelFile {
  std::vector<SentimentLabel> labels;
  std::vector<std::string> warnings;
};

/// Sums within 1e-6 of one are accepted unchanged; sums within 1e-3 are
/// renormalized with a warning; anything else is rejected.
inline constexpr double kSumExactBand = 1e-6;
inline constexpr double kSumRenormalizeBand = 1e-3;

/// Label file: header `phrase_id\tp_neutral\tp_positive\tp_negative`.
LabelFile parse_labels(std::istream& in);
void write_labels(std::ostream& out, const std::vector<SentimentLabel>& labels);

/// Human-annotation file: header `phrase_id\tn_neutral\tn_positive\tn_negative`.
std::vector<HumanAnnotation> parse_annotations(std::istream& in);

/// Highest-probability class; ties go to neutral, then positive.
Sentiment argmax_class(const Probs& p);
inline Sentiment argmax_class(const SentimentLabel& label) { return argmax_class(label.probs); }

ClassProportions class_proportions(const std::vector<SentimentLabel>& labels);

struct HumanAgreement {
  double rho_avg = 0.0;
  double p_avg = 0.0;
  std::array<stats::TestResult, kNumClasses> per_class{};
};

/// Per-class Spearman correlation between model probabilities and human
/// counts across phrases, then the average rho and average p over classes.
HumanAgreement compare_with_humans(const std::vector<SentimentLabel>& model_labels,
                                   const std::vector<HumanAnnotation>& annotations);

}  // namespace braindec
