#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "braindec/labels.hpp"
#include "braindec/metrics.hpp"

namespace braindec::report {

/// One row of metrics.csv (`seed,architecture,accuracy,balanced_accuracy`),
/// in percent.
struct MetricsRow {
  std::uint64_t seed = 0;
  std::string architecture;
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
};

/// One row of summary.csv (`architecture,metric,mean,sem,t,p,baseline`).
/// t and p are NaN when the seeds have no spread.
struct SummaryRow {
  std::string architecture;
  std::string metric;
  double mean = 0.0;
  double sem = 0.0;
  double t = 0.0;
  double p = 0.0;
  double baseline = 0.0;
};

inline constexpr std::string_view kPosthocMetric = "balanced_accuracy_posthoc";

/// One row of model_comparison.csv
/// (`model,pct_neutral,pct_positive,pct_negative,rho,p`).
struct ModelComparisonRow {
  std::string model;
  Probs percent{};
  double rho = 0.0;
  double p = 0.0;
};

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> parse_metrics_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> parse_summary_csv(std::istream& in);
void write_model_comparison_csv(std::ostream& out, const std::vector<ModelComparisonRow>& rows);
std::vector<ModelComparisonRow> parse_model_comparison_csv(std::istream& in);

/// Summary row from per-seed values; t/p are NaN for zero spread.
SummaryRow summary_row(const std::string& architecture, const std::string& metric, const std::vector<double>& values,
                       double baseline);

/// Independent-samples comparison of two summary rows (their means and SEMs)
/// with n_a and n_b seeds. mean holds the difference a - b and sem the
/// combined standard error sqrt(sem_a^2 + sem_b^2).
SummaryRow posthoc_row(const SummaryRow& a, std::size_t n_a, const SummaryRow& b, std::size_t n_b);

/// Class proportions of `labels` plus their averaged agreement with human
/// annotation counts.
ModelComparisonRow compare_model(const std::string& name, const std::vector<SentimentLabel>& labels,
                                 const std::vector<HumanAnnotation>& annotations);

/// Markdown tables mirroring the model-comparison and decoding-results
/// layouts. Values are rounded to three decimals and never recomputed.
std::string render_markdown(const std::vector<SummaryRow>& summary, const std::vector<ModelComparisonRow>& comparison);

/// Reads summary.csv and/or model_comparison.csv from `dir`; throws
/// Error("no metrics found") when neither exists.
std::string render_directory(const std::filesystem::path& dir);

/// Fixed three-decimal rendering; p-values under 0.001 use scientific notation.
std::string format_value(double v);
std::string format_p(double p);

}  // namespace braindec::report
