#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "braindec/error.hpp"
#include "braindec/labels.hpp"
#include "oracles.hpp"

using namespace braindec;

namespace {

LabelFile parse(const std::string& body) {
  std::istringstream in("phrase_id\tp_neutral\tp_positive\tp_negative\n" + body);
  return parse_labels(in);
}

std::string error_of(const std::string& body) {
  try {
    parse(body);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::vector<HumanAnnotation> annotations(const std::vector<std::array<std::int64_t, 3>>& counts) {
  std::vector<HumanAnnotation> out;
  for (std::size_t i = 0; i < counts.size(); ++i) out.push_back({static_cast<std::int64_t>(i), counts[i]});
  return out;
}

}  // namespace

TEST_CASE("exact row parses unchanged") {
  auto f = parse("0\t0.90\t0.05\t0.05\n");
  REQUIRE(f.labels.size() == 1);
  CHECK(f.labels[0] == SentimentLabel{0, {0.90, 0.05, 0.05}});
  CHECK(f.warnings.empty());
}

TEST_CASE("sum within renormalization band") {
  auto f = parse("1\t0.3334\t0.3333\t0.3332\n");
  REQUIRE(f.labels.size() == 1);
  const auto& p = f.labels[0].probs;
  CHECK(std::fabs(p[0] + p[1] + p[2] - 1.0) < 1e-12);
  CHECK(f.warnings.size() == 1);
  CHECK(p[0] == doctest::Approx(0.3334 / 0.9999).epsilon(1e-12));
}

TEST_CASE("sum outside band is an error") {
  CHECK(error_of("2\t0.5\t0.6\t0.1\n").find("probability sum 1.2 exceeds tolerance") != std::string::npos);
  CHECK_FALSE(error_of("0\t1.2\t-0.1\t-0.1\n").empty());
  CHECK_FALSE(error_of("0\t0.9\t0.05\t0.05\n0\t0.9\t0.05\t0.05\n").empty());
  CHECK_FALSE(error_of("0\t0.9\t0.05\n").empty());
}

TEST_CASE("band edges") {
  // deviation d: accepted silently up to 1e-6, renormalized up to 1e-3, rejected past it
  for (double d : {5e-7, -5e-7}) {
    auto f = parse("0\t" + std::to_string(0.5 + d) + "\t0.25\t0.25\n");
    CHECK(f.warnings.empty());
  }
  for (double d : {5e-4, -9e-4}) {
    auto f = parse("0\t" + std::to_string(0.5 + d) + "\t0.25\t0.25\n");
    CHECK(f.warnings.size() == 1);
  }
  for (double d : {2e-3, -1.5e-3}) CHECK_FALSE(error_of("0\t" + std::to_string(0.5 + d) + "\t0.25\t0.25\n").empty());
}

TEST_CASE("write then parse is byte stable") {
  std::mt19937_64 rng(7);
  // probabilities on the file's 6-digit grid, summing to exactly one million units
  std::vector<SentimentLabel> labels;
  for (int i = 0; i < 100; ++i) {
    const auto a = static_cast<std::int64_t>(rng() % 1000001);
    const auto b = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(1000001 - a));
    const auto c = 1000000 - a - b;
    labels.push_back({i * 3, {a / 1e6, b / 1e6, c / 1e6}});
  }
  std::ostringstream first;
  write_labels(first, labels);
  std::istringstream in(first.str());
  auto back = parse_labels(in);
  CHECK(back.warnings.empty());
  std::ostringstream second;
  write_labels(second, back.labels);
  CHECK(first.str() == second.str());
}

TEST_CASE("argmax with fixed tie order") {
  CHECK(argmax_class(Probs{0.8, 0.1, 0.1}) == Sentiment::neutral);
  CHECK(argmax_class(Probs{1.0 / 3, 1.0 / 3, 1.0 / 3}) == Sentiment::neutral);
  CHECK(argmax_class(Probs{0.2, 0.39, 0.41}) == Sentiment::negative);
  CHECK(argmax_class(Probs{0.1, 0.45, 0.45}) == Sentiment::positive);
}

TEST_CASE("argmax is scale invariant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    Probs p{u(rng), u(rng), u(rng)};
    const double k = 0.01 + 10 * u(rng);
    Probs q{p[0] * k, p[1] * k, p[2] * k};
    const double s = q[0] + q[1] + q[2];
    for (auto& v : q) v /= s;
    CHECK(argmax_class(p) == argmax_class(q));
  }
}

TEST_CASE("class proportions") {
  std::vector<SentimentLabel> all_neutral(10, SentimentLabel{0, {0.8, 0.1, 0.1}});
  auto a = class_proportions(all_neutral);
  CHECK(a.percent == Probs{100, 0, 0});

  auto b = class_proportions({{0, {0.8, 0.1, 0.1}}, {1, {0.1, 0.8, 0.1}}, {2, {0.1, 0.1, 0.8}}});
  for (double v : b.percent) CHECK(v == doctest::Approx(100.0 / 3).epsilon(1e-12));

  CHECK_THROWS_AS(class_proportions({}), Error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<SentimentLabel> labels;
    const int n = 1 + static_cast<int>(rng() % 97);
    for (int i = 0; i < n; ++i) labels.push_back({i, {u(rng), u(rng), u(rng)}});
    auto c = class_proportions(labels);
    CHECK(std::fabs(c.percent[0] + c.percent[1] + c.percent[2] - 100.0) < 1e-6);
  }
}

TEST_CASE("human agreement: monotone and reversed") {
  std::vector<std::array<std::int64_t, 3>> counts{{1, 5, 2}, {3, 0, 7}, {6, 2, 1}, {2, 8, 4}, {9, 1, 0}, {4, 3, 6}};
  auto ann = annotations(counts);
  std::vector<SentimentLabel> same, reversed;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    Probs p{}, q{};
    for (int k = 0; k < 3; ++k) {
      p[static_cast<std::size_t>(k)] = static_cast<double>(counts[i][static_cast<std::size_t>(k)]) / 20.0;
      q[static_cast<std::size_t>(k)] = 1.0 - p[static_cast<std::size_t>(k)];
    }
    same.push_back({static_cast<std::int64_t>(i), p});
    reversed.push_back({static_cast<std::int64_t>(i), q});
  }
  CHECK(compare_with_humans(same, ann).rho_avg == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(compare_with_humans(reversed, ann).rho_avg == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("human agreement: eight phrase fixture against brute-force ranks") {
  const std::vector<std::array<std::int64_t, 3>> counts{{3, 1, 1}, {0, 4, 1}, {2, 2, 1}, {5, 0, 0},
                                                        {1, 1, 3}, {4, 1, 0}, {2, 0, 3}, {3, 2, 0}};
  const std::vector<Probs> probs{{0.70, 0.20, 0.10}, {0.10, 0.85, 0.05}, {0.50, 0.30, 0.20}, {0.90, 0.05, 0.05},
                                 {0.20, 0.20, 0.60}, {0.75, 0.20, 0.05}, {0.40, 0.05, 0.55}, {0.55, 0.40, 0.05}};
  std::vector<SentimentLabel> labels;
  // ids deliberately out of order on the model side
  for (int i = 7; i >= 0; --i) labels.push_back({i, probs[static_cast<std::size_t>(i)]});
  auto agreement = compare_with_humans(labels, annotations(counts));

  double rho_sum = 0, p_sum = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < 8; ++i) {
      x.push_back(probs[i][k]);
      y.push_back(static_cast<double>(counts[i][k]));
    }
    auto ref = oracle::spearman(x, y);
    CHECK(agreement.per_class[k].statistic == doctest::Approx(ref.statistic).epsilon(1e-12));
    CHECK(agreement.per_class[k].p_value == doctest::Approx(ref.p).epsilon(1e-9));
    rho_sum += ref.statistic;
    p_sum += ref.p;
  }
  CHECK(agreement.rho_avg == doctest::Approx(rho_sum / 3).epsilon(1e-12));
  CHECK(agreement.p_avg == doctest::Approx(p_sum / 3).epsilon(1e-9));
  CHECK(agreement.rho_avg >= -1.0);
  CHECK(agreement.rho_avg <= 1.0);
}

TEST_CASE("human agreement is rank invariant") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 6 + static_cast<int>(rng() % 20);
    std::vector<SentimentLabel> labels, transformed;
    std::vector<HumanAnnotation> ann;
    for (int i = 0; i < n; ++i) {
      Probs p{u(rng), u(rng), u(rng)};
      labels.push_back({i, p});
      Probs q = p;
      q[1] = std::exp(3 * p[1]) + p[1] * p[1] * p[1];
      transformed.push_back({i, q});
      ann.push_back({i, {static_cast<std::int64_t>(rng() % 6), static_cast<std::int64_t>(rng() % 6) + 1,
                         static_cast<std::int64_t>(rng() % 6)}});
    }
    ann[0].counts = {0, 1, 0};
    ann[1].counts = {1, 2, 1};
    auto a = compare_with_humans(labels, ann);
    auto b = compare_with_humans(transformed, ann);
    CHECK(a.rho_avg == doctest::Approx(b.rho_avg).epsilon(1e-12));
  }
}

TEST_CASE("human agreement errors") {
  auto ann = annotations({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {2, 1, 0}});
  std::vector<SentimentLabel> labels{{0, {0.5, 0.3, 0.2}}, {1, {0.2, 0.6, 0.2}}, {2, {0.1, 0.2, 0.7}}};
  CHECK_THROWS_AS(compare_with_humans(labels, ann), Error);
  labels.push_back({9, {0.6, 0.3, 0.1}});
  CHECK_THROWS_AS(compare_with_humans(labels, ann), Error);
  labels.back().phrase_id = 3;
  for (auto& l : labels) l.probs[1] = 0.25;
  try {
    compare_with_humans(labels, ann);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("positive") != std::string::npos);
  }
}

TEST_CASE("annotation file") {
  std::istringstream in("phrase_id\tn_neutral\tn_positive\tn_negative\n0\t3\t1\t0\n1\t0\t0\t2\n");
  auto a = parse_annotations(in);
  REQUIRE(a.size() == 2);
  CHECK(a[1].counts[2] == 2);
  std::istringstream neg("phrase_id\tn_neutral\tn_positive\tn_negative\n0\t-1\t1\t0\n");
  CHECK_THROWS_AS(parse_annotations(neg), Error);
  std::istringstream zero("phrase_id\tn_neutral\tn_positive\tn_negative\n0\t0\t0\t0\n");
  CHECK_THROWS_AS(parse_annotations(zero), Error);
}
