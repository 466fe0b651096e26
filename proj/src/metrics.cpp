#include "braindec/metrics.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "braindec/error.hpp"

namespace braindec::metrics {

std::int64_t ConfusionMatrix::total() const {
  std::int64_t n = 0;
  for (const auto& row : counts) {
    for (auto v : row) n += v;
  }
  return n;
}

std::int64_t ConfusionMatrix::row_total(int true_class) const {
  std::int64_t n = 0;
  for (auto v : counts[true_class]) n += v;
  return n;
}

ConfusionMatrix confusion(const std::vector<Sentiment>& truth, const std::vector<Sentiment>& predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(fmt::format("{} true classes vs {} predictions", truth.size(), predicted.size()));
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  const auto n = cm.total();
  if (n <= 0) throw Error("accuracy of an empty confusion matrix");
  std::int64_t hits = 0;
  for (int k = 0; k < kNumClasses; ++k) hits += cm.counts[k][k];
  return static_cast<double>(hits) / static_cast<double>(n);
}

BalancedAccuracy balanced_accuracy_detail(const ConfusionMatrix& cm) {
  BalancedAccuracy out;
  double recall_sum = 0.0;
  int present = 0;
  for (int k = 0; k < kNumClasses; ++k) {
    const auto row = cm.row_total(k);
    if (row < 0) throw Error("negative confusion count");
    if (row == 0) {
      ++out.excluded_classes;
      continue;
    }
    recall_sum += static_cast<double>(cm.counts[k][k]) / static_cast<double>(row);
    ++present;
  }
  if (present == 0) throw Error("balanced accuracy of an empty confusion matrix");
  out.value = recall_sum / present;
  return out;
}

Baselines baselines(const std::vector<SentimentLabel>& train_labels) {
  if (train_labels.empty()) throw Error("baselines need at least one training label");
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& l : train_labels) ++counts[static_cast<int>(argmax_class(l))];
  Baselines b;
  b.majority_accuracy =
      static_cast<double>(*std::max_element(counts.begin(), counts.end())) / static_cast<double>(train_labels.size());
  return b;
}

SeedSummary summarize(const std::vector<double>& per_seed, double baseline) {
  if (per_seed.size() < 2) throw Error("a seed summary needs at least 2 seeds");
  SeedSummary s;
  s.n = per_seed.size();
  s.mean = stats::mean(per_seed);
  s.baseline = baseline;
  s.sem = stats::sem(per_seed);
  if (!(s.sem > 0.0)) throw Error("degenerate seed spread: all per-seed values are identical");
  s.test = stats::one_sample_t(per_seed, baseline, stats::Sidedness::one_sided_greater);
  return s;
}

}  // namespace braindec::metrics
