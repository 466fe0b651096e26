#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "braindec/error.hpp"
#include "braindec/stats.hpp"
#include "oracles.hpp"

using namespace braindec;
using stats::Sidedness;

TEST_CASE("fractional ranks") {
  CHECK(stats::fractional_ranks(std::vector<double>{3, 1, 2}) == std::vector<double>{3, 1, 2});
  CHECK(stats::fractional_ranks(std::vector<double>{5, 5}) == std::vector<double>{1.5, 1.5});
  CHECK(stats::fractional_ranks(std::vector<double>{2, 1, 2, 3}) == std::vector<double>{2.5, 1, 2.5, 4});

  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<double> x(n);
    for (auto& v : x) v = static_cast<double>(rng() % 7);
    auto r = stats::fractional_ranks(x);
    CHECK(r == oracle::brute_ranks(x));
    CHECK(std::accumulate(r.begin(), r.end(), 0.0) == static_cast<double>(n * (n + 1)) / 2.0);
  }
}

TEST_CASE("spearman perfect monotone and reversed") {
  for (int n = 4; n < 12; ++n) {
    std::vector<double> x(static_cast<std::size_t>(n)), y;
    std::iota(x.begin(), x.end(), 0.5);
    y.assign(x.rbegin(), x.rend());
    auto same = stats::spearman(x, x);
    CHECK(same.statistic == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(same.p_value == 0.0);
    auto rev = stats::spearman(x, y);
    CHECK(rev.statistic == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(rev.p_value == 0.0);
  }
}

TEST_CASE("spearman six point fixture") {
  std::vector<double> x{1, 2, 3, 4, 5, 6}, y{2, 1, 4, 3, 6, 5};
  auto r = stats::spearman(x, y);
  auto ref = oracle::spearman(x, y);
  CHECK(r.statistic == doctest::Approx(ref.statistic).epsilon(1e-12));
  CHECK(std::fabs(r.p_value - ref.p) < 1e-9);
  CHECK(r.df == 4);
  CHECK(r.sidedness == Sidedness::two_sided);
  // reference values computed with a separate statistics package
  CHECK(std::fabs(r.statistic - 0.8285714285714287) < 1e-12);
  CHECK(std::fabs(r.p_value - 0.04156268221574334) < 1e-9);
}

TEST_CASE("spearman over every permutation for n <= 6") {
  for (int n = 4; n <= 6; ++n) {
    std::vector<double> x(static_cast<std::size_t>(n));
    std::iota(x.begin(), x.end(), 1.0);
    std::vector<double> y = x;
    do {
      double d2 = 0;
      for (int i = 0; i < n; ++i) d2 += (x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]) *
                                        (x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]);
      const double closed = 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
      auto r = stats::spearman(x, y);
      auto ref = oracle::spearman(x, y);
      CHECK(std::fabs(r.statistic - closed) < 1e-12);
      CHECK(std::fabs(r.p_value - ref.p) < 1e-9);
    } while (std::next_permutation(y.begin(), y.end()));
  }
}

TEST_CASE("spearman properties") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 4 + rng() % 40;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = g(rng);
      y[i] = x[i] + 2 * g(rng);
    }
    auto a = stats::spearman(x, y);
    auto b = stats::spearman(y, x);
    CHECK(a.statistic == b.statistic);
    CHECK(a.p_value == b.p_value);
    std::vector<double> tx(n);
    std::transform(x.begin(), x.end(), tx.begin(), [](double v) { return std::exp(v) + v * v * v; });
    CHECK(stats::spearman(tx, y).statistic == doctest::Approx(a.statistic).epsilon(1e-12));
    auto ref = oracle::spearman(x, y);
    CHECK(std::fabs(a.p_value - ref.p) < 1e-9);
    CHECK(a.p_value >= 0.0);
    CHECK(a.p_value <= 1.0);
  }
}

TEST_CASE("spearman errors") {
  std::vector<double> c{1, 1, 1, 1, 1}, x{1, 2, 3, 4, 5};
  try {
    stats::spearman(c, x);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("undefined correlation") != std::string::npos);
  }
  CHECK_THROWS_AS(stats::spearman(x, std::vector<double>{1, 2, 3, 4}), Error);
  CHECK_THROWS_AS(stats::spearman(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}), Error);
}

TEST_CASE("one sample t") {
  std::vector<double> x{34, 35, 36, 35, 34};
  auto r = stats::one_sample_t(x, 33.333, Sidedness::one_sided_greater);
  auto ref = oracle::one_sample_t(x, 33.333, true);
  CHECK(std::fabs(r.statistic - ref.statistic) < 1e-9);
  CHECK(std::fabs(r.p_value - ref.p) < 1e-9);
  CHECK(r.df == 4);
  CHECK(std::fabs(r.statistic - 3.9207224188552625) < 1e-9);
  CHECK(std::fabs(r.p_value - 0.008618592660691229) < 1e-9);

  std::vector<double> centred{1, 2, 3, 4, 5};
  auto two = stats::one_sample_t(centred, 3.0, Sidedness::two_sided);
  CHECK(two.statistic == 0.0);
  CHECK(two.p_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(stats::one_sample_t(centred, 3.0, Sidedness::one_sided_greater).p_value == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(stats::one_sample_t(std::vector<double>{1}, 0, Sidedness::two_sided), Error);
  CHECK_THROWS_AS(stats::one_sample_t(std::vector<double>{2, 2, 2}, 0, Sidedness::two_sided), Error);
}

TEST_CASE("one sample t from summary-shaped input") {
  // ten values whose mean is 35.878 and SEM is 0.335 exactly
  const double sem = 0.335, sd = sem * std::sqrt(10.0);
  std::vector<double> x(10);
  for (int i = 0; i < 10; ++i) x[static_cast<std::size_t>(i)] = 35.878 + (i % 2 ? 1 : -1) * sd * std::sqrt(0.9);
  CHECK(stats::sem(x) == doctest::Approx(0.335).epsilon(1e-12));
  auto r = stats::one_sample_t(x, 33.333, Sidedness::one_sided_greater);
  CHECK(r.statistic == doctest::Approx((35.878 - 33.333) / 0.335).epsilon(1e-12));
  CHECK(r.statistic == doctest::Approx(7.597).epsilon(1e-4));
}

TEST_CASE("one sided p falls as the mean shift grows") {
  std::vector<double> base{-1.0, 0.5, 0.25, 1.5, -0.75, 0.1};
  double prev = 2.0;
  for (int k = 0; k < 40; ++k) {
    std::vector<double> x = base;
    for (auto& v : x) v += 0.1 * k;
    const double p = stats::one_sample_t(x, 0.0, Sidedness::one_sided_greater).p_value;
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("two sample t from summaries") {
  auto r = stats::two_sample_t_summary(35.878, 0.335, 10, 35.745, 0.245, 10);
  CHECK(r.df == 18);
  CHECK(std::fabs(r.statistic - 0.3204586698329781) < 1e-12);
  CHECK(std::fabs(r.p_value - 0.752310979512844) < 1e-9);
  CHECK(r.statistic == doctest::Approx(0.321).epsilon(1e-3));

  auto same = stats::two_sample_t_summary(2.0, 0.3, 7, 2.0, 0.3, 7);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == doctest::Approx(1.0).epsilon(1e-12));

  auto b = stats::two_sample_t_summary(1.0, 0.1, 5, 0.0, 0.1, 5);
  auto ref = oracle::two_sample_t(1.0, 0.1, 5, 0.0, 0.1, 5);
  CHECK(b.df == 8);
  CHECK(std::fabs(b.statistic - 7.071067811865474) < 1e-9);
  CHECK(std::fabs(b.p_value - ref.p) < 1e-9);

  CHECK_THROWS_AS(stats::two_sample_t_summary(1, 0.1, 1, 0, 0.1, 5), Error);
  CHECK_THROWS_AS(stats::two_sample_t_summary(1, 0.0, 5, 0, 0.1, 5), Error);
  CHECK_THROWS_AS(stats::two_sample_t_summary(1, -0.1, 5, 0, 0.1, 5), Error);
}

TEST_CASE("two sample t with equal n reduces to the sem form") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + static_cast<int>(rng() % 30);
    const double m1 = 10 * u(rng), m2 = 10 * u(rng), s1 = u(rng), s2 = u(rng);
    auto r = stats::two_sample_t_summary(m1, s1, n, m2, s2, n);
    CHECK(std::fabs(r.statistic - (m1 - m2) / std::sqrt(s1 * s1 + s2 * s2)) < 1e-12 * std::max(1.0, std::fabs(r.statistic)));
    auto ref = oracle::two_sample_t(m1, s1, n, m2, s2, n);
    CHECK(std::fabs(r.p_value - ref.p) < 1e-9);
  }
}

TEST_CASE("t cdf") {
  CHECK(std::fabs(stats::t_cdf(1.0, 1.0) - 0.75) < 1e-12);
  for (double df : {0.5, 1.0, 3.0, 10.0, 1e3}) CHECK(stats::t_cdf(0.0, df) == 0.5);
  CHECK(std::fabs(stats::t_cdf(2.228, 10) - 0.975) < 5e-4);
  CHECK(std::fabs(stats::t_cdf(2.228, 10) - 0.9749941140914443) < 1e-9);
  CHECK_THROWS_AS(stats::t_cdf(1.0, 0.0), Error);
  CHECK_THROWS_AS(stats::t_cdf(1.0, -2.0), Error);
}

TEST_CASE("t cdf against the reference over a grid") {
  for (double df : {0.7, 1.0, 2.0, 4.0, 9.0, 18.0, 30.0, 120.0, 1e4}) {
    for (double t = -40.0; t <= 40.0; t += 0.37) {
      CHECK(std::fabs(stats::t_cdf(t, df) - oracle::t_cdf(t, df)) < 1e-12);
    }
  }
}

TEST_CASE("t cdf symmetry and monotonicity") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ut(-30.0, 30.0), udf(0.2, 200.0);
  for (int i = 0; i < 2000; ++i) {
    const double t = ut(rng), df = udf(rng);
    CHECK(std::fabs(stats::t_cdf(t, df) + stats::t_cdf(-t, df) - 1.0) < 1e-12);
    CHECK(std::fabs(stats::t_sf(t, df) - stats::t_cdf(-t, df)) < 1e-15);
  }
  for (double df : {1.0, 5.0, 50.0}) {
    double prev = 0.0;
    for (double t = -50.0; t <= 50.0; t += 0.01) {
      const double c = stats::t_cdf(t, df);
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("incomplete beta closed forms") {
  // I_x(1, b) = 1 - (1 - x)^b and I_x(a, 1) = x^a
  for (double x : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    CHECK(std::fabs(stats::incomplete_beta(1.0, 3.0, x) - (1.0 - std::pow(1.0 - x, 3.0))) < 1e-13);
    CHECK(std::fabs(stats::incomplete_beta(2.5, 1.0, x) - std::pow(x, 2.5)) < 1e-13);
  }
}

TEST_CASE("summary helpers") {
  std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(stats::mean(x) == 5.0);
  CHECK(stats::sample_sd(x) == doctest::Approx(std::sqrt(32.0 / 7.0)).epsilon(1e-15));
  CHECK(stats::sem(x) == doctest::Approx(std::sqrt(32.0 / 7.0) / std::sqrt(8.0)).epsilon(1e-15));
}
