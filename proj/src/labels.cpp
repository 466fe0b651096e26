#include "braindec/labels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "braindec/error.hpp"
#include "braindec/io_util.hpp"

namespace braindec {
namespace {

constexpr std::string_view kLabelHeader = "phrase_id\tp_neutral\tp_positive\tp_negative";
constexpr std::string_view kAnnotationHeader = "phrase_id\tn_neutral\tn_positive\tn_negative";

void expect_header(std::istream& in, std::string_view header, std::string_view what) {
  std::string line;
  if (!read_line(in, line)) throw Error(fmt::format("{} file is empty (missing header)", what));
  if (line != header) throw Error(fmt::format("line 1: expected {} header '{}', found '{}'", what, header, line));
}

}  // namespace

std::string_view to_string(Sentiment s) {
  switch (s) {
    case Sentiment::neutral: return "neutral";
    case Sentiment::positive: return "positive";
    case Sentiment::negative: return "negative";
  }
  return "unknown";
}

Sentiment sentiment_from_string(std::string_view name) {
  if (name == "neutral") return Sentiment::neutral;
  if (name == "positive") return Sentiment::positive;
  if (name == "negative") return Sentiment::negative;
  throw Error(fmt::format("unknown sentiment class '{}'", name));
}

LabelFile parse_labels(std::istream& in) {
  expect_header(in, kLabelHeader, "label");
  LabelFile out;
  std::set<std::int64_t> seen;
  std::string line;
  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw Error(fmt::format("line {}: expected 4 tab-separated columns, found {}", line_no, fields.size()));
    }
    SentimentLabel label;
    label.phrase_id = parse_int(fields[0], "phrase_id", line_no);
    double sum = 0.0;
    for (int k = 0; k < kNumClasses; ++k) {
      const double p = parse_double(fields[k + 1], "probability", line_no);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(fmt::format("line {}: probability {} outside [0, 1]", line_no, fields[k + 1]));
      }
      label.probs[k] = p;
      sum += p;
    }
    const double deviation = std::fabs(sum - 1.0);
    if (deviation > kSumRenormalizeBand) {
      throw Error(fmt::format("line {}: probability sum {:.6g} exceeds tolerance", line_no, sum));
    }
    if (deviation > kSumExactBand) {
      for (auto& p : label.probs) p /= sum;
      out.warnings.push_back(
          fmt::format("line {}: probability sum {:.6g} renormalized (phrase {})", line_no, sum, label.phrase_id));
    }
    if (!seen.insert(label.phrase_id).second) {
      throw Error(fmt::format("line {}: duplicate phrase_id {}", line_no, label.phrase_id));
    }
    out.labels.push_back(label);
  }
  return out;
}

void write_labels(std::ostream& out, const std::vector<SentimentLabel>& labels) {
  out << kLabelHeader << '\n';
  for (const auto& l : labels) {
    out << l.phrase_id << '\t' << format_fixed6(l.probs[0]) << '\t' << format_fixed6(l.probs[1]) << '\t'
        << format_fixed6(l.probs[2]) << '\n';
  }
}

std::vector<HumanAnnotation> parse_annotations(std::istream& in) {
  expect_header(in, kAnnotationHeader, "annotation");
  std::vector<HumanAnnotation> out;
  std::set<std::int64_t> seen;
  std::string line;
  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw Error(fmt::format("line {}: expected 4 tab-separated columns, found {}", line_no, fields.size()));
    }
    HumanAnnotation a;
    a.phrase_id = parse_int(fields[0], "phrase_id", line_no);
    std::int64_t total = 0;
    for (int k = 0; k < kNumClasses; ++k) {
      a.counts[k] = parse_int(fields[k + 1], "count", line_no);
      if (a.counts[k] < 0) throw Error(fmt::format("line {}: negative annotation count", line_no));
      total += a.counts[k];
    }
    if (total < 1) throw Error(fmt::format("line {}: phrase {} has no annotations", line_no, a.phrase_id));
    if (!seen.insert(a.phrase_id).second) {
      throw Error(fmt::format("line {}: duplicate phrase_id {}", line_no, a.phrase_id));
    }
    out.push_back(a);
  }
  return out;
}

Sentiment argmax_class(const Probs& p) {
  int best = 0;
  for (int k = 1; k < kNumClasses; ++k) {
    if (p[k] > p[best]) best = k;
  }
  return static_cast<Sentiment>(best);
}

ClassProportions class_proportions(const std::vector<SentimentLabel>& labels) {
  if (labels.empty()) throw Error("class proportions of an empty label set");
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& l : labels) ++counts[static_cast<int>(argmax_class(l))];
  ClassProportions out;
  for (int k = 0; k < kNumClasses; ++k) {
    out.percent[k] = 100.0 * static_cast<double>(counts[k]) / static_cast<double>(labels.size());
  }
  return out;
}

HumanAgreement compare_with_humans(const std::vector<SentimentLabel>& model_labels,
                                   const std::vector<HumanAnnotation>& annotations) {
  std::map<std::int64_t, const SentimentLabel*> by_id;
  for (const auto& l : model_labels) by_id[l.phrase_id] = &l;
  if (by_id.size() != annotations.size()) {
    throw Error(fmt::format("phrase sets differ: {} model labels vs {} annotations", by_id.size(), annotations.size()));
  }
  std::vector<const HumanAnnotation*> sorted;
  for (const auto& a : annotations) {
    if (!by_id.count(a.phrase_id)) throw Error(fmt::format("phrase {} has annotations but no model label", a.phrase_id));
    sorted.push_back(&a);
  }
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->phrase_id < b->phrase_id; });

  HumanAgreement out;
  for (int k = 0; k < kNumClasses; ++k) {
    std::vector<double> model, human;
    for (const auto* a : sorted) {
      model.push_back(by_id.at(a->phrase_id)->probs[k]);
      human.push_back(static_cast<double>(a->counts[k]));
    }
    try {
      out.per_class[k] = stats::spearman(model, human);
    } catch (const Error& e) {
      throw Error(fmt::format("{} class: {}", to_string(static_cast<Sentiment>(k)), e.what()));
    }
    out.rho_avg += out.per_class[k].statistic / kNumClasses;
    out.p_avg += out.per_class[k].p_value / kNumClasses;
  }
  return out;
}

}  // namespace braindec
