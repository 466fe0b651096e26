#include "braindec/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "braindec/error.hpp"
#include "braindec/io_util.hpp"
#include "braindec/stats.hpp"

namespace braindec::report {
namespace {

constexpr std::string_view kMetricsHeader = "seed,architecture,accuracy,balanced_accuracy";
constexpr std::string_view kSummaryHeader = "architecture,metric,mean,sem,t,p,baseline";
constexpr std::string_view kComparisonHeader = "model,pct_neutral,pct_positive,pct_negative,rho,p";

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

double parse_csv_double(std::string_view field, std::string_view what, std::size_t line_no) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  return parse_double(field, what, line_no);
}

std::string csv_double(double v) { return std::isnan(v) ? std::string("nan") : format_exact(v); }

template <typename Row, typename Fn>
std::vector<Row> parse_csv(std::istream& in, std::string_view header, std::size_t columns, Fn&& make) {
  std::string line;
  if (!read_line(in, line) || line != header) throw Error(fmt::format("line 1: expected CSV header '{}'", header));
  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != columns) {
      throw Error(fmt::format("line {}: expected {} columns, found {}", line_no, columns, fields.size()));
    }
    rows.push_back(make(fields, line_no));
  }
  return rows;
}

std::string display_name(std::string_view arch) {
  if (arch == "mlp") return "MLP";
  if (arch == "lstm") return "LSTM";
  return std::string(arch);
}

}  // namespace

std::string format_value(double v) { return std::isnan(v) ? std::string("--") : fmt::format("{:.3f}", v); }

std::string format_p(double p) {
  if (std::isnan(p)) return "--";
  if (p != 0.0 && p < 1e-3) return fmt::format("{:.3e}", p);
  return fmt::format("{:.3f}", p);
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    out << r.seed << ',' << r.architecture << ',' << csv_double(r.accuracy) << ',' << csv_double(r.balanced_accuracy)
        << '\n';
  }
}

std::vector<MetricsRow> parse_metrics_csv(std::istream& in) {
  return parse_csv<MetricsRow>(in, kMetricsHeader, 4, [](const auto& f, std::size_t line_no) {
    MetricsRow r;
    r.seed = static_cast<std::uint64_t>(parse_int(f[0], "seed", line_no));
    r.architecture = std::string(f[1]);
    r.accuracy = parse_csv_double(f[2], "accuracy", line_no);
    r.balanced_accuracy = parse_csv_double(f[3], "balanced_accuracy", line_no);
    return r;
  });
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.architecture << ',' << r.metric << ',' << csv_double(r.mean) << ',' << csv_double(r.sem) << ','
        << csv_double(r.t) << ',' << csv_double(r.p) << ',' << csv_double(r.baseline) << '\n';
  }
}

std::vector<SummaryRow> parse_summary_csv(std::istream& in) {
  return parse_csv<SummaryRow>(in, kSummaryHeader, 7, [](const auto& f, std::size_t line_no) {
    SummaryRow r;
    r.architecture = std::string(f[0]);
    r.metric = std::string(f[1]);
    r.mean = parse_csv_double(f[2], "mean", line_no);
    r.sem = parse_csv_double(f[3], "sem", line_no);
    r.t = parse_csv_double(f[4], "t", line_no);
    r.p = parse_csv_double(f[5], "p", line_no);
    r.baseline = parse_csv_double(f[6], "baseline", line_no);
    return r;
  });
}

void write_model_comparison_csv(std::ostream& out, const std::vector<ModelComparisonRow>& rows) {
  out << kComparisonHeader << '\n';
  for (const auto& r : rows) {
    out << r.model << ',' << csv_double(r.percent[0]) << ',' << csv_double(r.percent[1]) << ','
        << csv_double(r.percent[2]) << ',' << csv_double(r.rho) << ',' << csv_double(r.p) << '\n';
  }
}

std::vector<ModelComparisonRow> parse_model_comparison_csv(std::istream& in) {
  return parse_csv<ModelComparisonRow>(in, kComparisonHeader, 6, [](const auto& f, std::size_t line_no) {
    ModelComparisonRow r;
    r.model = std::string(f[0]);
    for (int k = 0; k < kNumClasses; ++k) r.percent[k] = parse_csv_double(f[k + 1], "percentage", line_no);
    r.rho = parse_csv_double(f[4], "rho", line_no);
    r.p = parse_csv_double(f[5], "p", line_no);
    return r;
  });
}

SummaryRow summary_row(const std::string& architecture, const std::string& metric, const std::vector<double>& values,
                       double baseline) {
  SummaryRow row;
  row.architecture = architecture;
  row.metric = metric;
  row.baseline = baseline;
  row.mean = stats::mean(values);
  row.sem = values.size() >= 2 ? stats::sem(values) : std::numeric_limits<double>::quiet_NaN();
  row.t = row.p = std::numeric_limits<double>::quiet_NaN();
  if (values.size() >= 2 && row.sem > 0.0) {
    const auto s = metrics::summarize(values, baseline);
    row.t = s.test.statistic;
    row.p = s.test.p_value;
  }
  return row;
}

SummaryRow posthoc_row(const SummaryRow& a, std::size_t n_a, const SummaryRow& b, std::size_t n_b) {
  const auto test = stats::two_sample_t_summary(a.mean, a.sem, static_cast<int>(n_a), b.mean, b.sem,
                                                static_cast<int>(n_b));
  SummaryRow row;
  row.architecture = a.architecture + "_vs_" + b.architecture;
  row.metric = std::string(kPosthocMetric);
  row.mean = a.mean - b.mean;
  row.sem = std::sqrt(a.sem * a.sem + b.sem * b.sem);
  row.t = test.statistic;
  row.p = test.p_value;
  row.baseline = 0.0;
  return row;
}

ModelComparisonRow compare_model(const std::string& name, const std::vector<SentimentLabel>& labels,
                                 const std::vector<HumanAnnotation>& annotations) {
  std::vector<SentimentLabel> annotated;
  for (const auto& a : annotations) {
    const auto it = std::find_if(labels.begin(), labels.end(), [&](const auto& l) { return l.phrase_id == a.phrase_id; });
    if (it == labels.end()) throw Error(fmt::format("{}: no label for annotated phrase {}", name, a.phrase_id));
    annotated.push_back(*it);
  }
  ModelComparisonRow row;
  row.model = name;
  row.percent = class_proportions(labels).percent;
  const auto agreement = compare_with_humans(annotated, annotations);
  row.rho = agreement.rho_avg;
  row.p = agreement.p_avg;
  return row;
}

std::string render_markdown(const std::vector<SummaryRow>& summary, const std::vector<ModelComparisonRow>& comparison) {
  std::ostringstream md;
  if (!comparison.empty()) {
    md << "## Sentiment model comparison\n\n";
    md << "| Model | Neutral (%) | Positive (%) | Negative (%) | rho | p |\n";
    md << "|---|---:|---:|---:|---:|---:|\n";
    for (const auto& r : comparison) {
      md << "| " << r.model << " | " << format_value(r.percent[0]) << " | " << format_value(r.percent[1]) << " | "
         << format_value(r.percent[2]) << " | " << format_value(r.rho) << " | " << format_p(r.p) << " |\n";
    }
    md << '\n';
  }
  if (!summary.empty()) {
    std::vector<std::string> archs;
    const SummaryRow* posthoc = nullptr;
    const SummaryRow* acc_baseline = nullptr;
    const SummaryRow* bal_baseline = nullptr;
    for (const auto& r : summary) {
      if (r.metric == kPosthocMetric) {
        posthoc = &r;
        continue;
      }
      if (r.metric == "accuracy" && acc_baseline == nullptr) acc_baseline = &r;
      if (r.metric == "balanced_accuracy" && bal_baseline == nullptr) bal_baseline = &r;
      if (std::find(archs.begin(), archs.end(), r.architecture) == archs.end()) archs.push_back(r.architecture);
    }
    auto find = [&](const std::string& arch, std::string_view metric) -> const SummaryRow* {
      for (const auto& r : summary) {
        if (r.architecture == arch && r.metric == metric) return &r;
      }
      return nullptr;
    };
    auto cell = [](const SummaryRow* r) {
      return r == nullptr ? std::string("--") : format_value(r->mean) + " ± " + format_value(r->sem);
    };
    md << "## Decoding results\n\n";
    md << "| Model | Accuracy | t | p | Balanced Accuracy | t | p |\n";
    md << "|---|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& arch : archs) {
      const auto* acc = find(arch, "accuracy");
      const auto* bal = find(arch, "balanced_accuracy");
      md << "| " << display_name(arch) << " | " << cell(acc) << " | " << (acc ? format_value(acc->t) : "--") << " | "
         << (acc ? format_p(acc->p) : "--") << " | " << cell(bal) << " | " << (bal ? format_value(bal->t) : "--")
         << " | " << (bal ? format_p(bal->p) : "--") << " |\n";
    }
    md << "| Baseline | " << (acc_baseline ? format_value(acc_baseline->baseline) : "--") << " | -- | -- | "
       << (bal_baseline ? format_value(bal_baseline->baseline) : "--") << " | -- | -- |\n";
    md << "\nStatistics are one-sided one-sample t-tests against the baseline; values are mean ± SEM over seeds.\n";
    if (posthoc != nullptr) {
      md << "\nPosthoc (" << posthoc->architecture << ", balanced accuracy, independent samples t-test): "
         << "difference " << format_value(posthoc->mean) << ", t = " << format_value(posthoc->t)
         << ", p = " << format_p(posthoc->p) << "\n";
    }
  }
  return md.str();
}

std::string render_directory(const std::filesystem::path& dir) {
  std::vector<SummaryRow> summary;
  std::vector<ModelComparisonRow> comparison;
  bool found = false;
  if (std::filesystem::exists(dir / "summary.csv")) {
    std::ifstream in(dir / "summary.csv");
    summary = parse_summary_csv(in);
    found = true;
  }
  if (std::filesystem::exists(dir / "model_comparison.csv")) {
    std::ifstream in(dir / "model_comparison.csv");
    comparison = parse_model_comparison_csv(in);
    found = true;
  }
  if (!found || (summary.empty() && comparison.empty())) throw Error("no metrics found in " + dir.string());
  return render_markdown(summary, comparison);
}

}  // namespace braindec::report
