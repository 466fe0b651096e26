#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "braindec/labels.hpp"
#include "braindec/stats.hpp"

namespace braindec::metrics {

/// Rows are the true class, columns the predicted class.
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> counts{};

  void add(Sentiment truth, Sentiment predicted) { ++counts[static_cast<int>(truth)][static_cast<int>(predicted)]; }
  std::int64_t total() const;
  std::int64_t row_total(int true_class) const;
};

ConfusionMatrix confusion(const std::vector<Sentiment>& truth, const std::vector<Sentiment>& predicted);

double accuracy(const ConfusionMatrix& cm);

struct BalancedAccuracy {
  double value = 0.0;
  int excluded_classes = 0;  // classes with no true instances
};

/// Mean recall over classes present in the truth.
BalancedAccuracy balanced_accuracy_detail(const ConfusionMatrix& cm);
inline double balanced_accuracy(const ConfusionMatrix& cm) { return balanced_accuracy_detail(cm).value; }

struct Baselines {
  double majority_accuracy = 0.0;  // share of the most frequent argmax class
  double chance_balanced = 1.0 / 3.0;
};

Baselines baselines(const std::vector<SentimentLabel>& train_labels);

struct SeedSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sem = 0.0;
  stats::TestResult test;  // one-sided, greater than the baseline
  double baseline = 0.0;
};

/// Mean, SEM and the one-sided one-sample t-test against `baseline`.
SeedSummary summarize(const std::vector<double>& per_seed, double baseline);

}  // namespace braindec::metrics
