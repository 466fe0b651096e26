#include "braindec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "braindec/error.hpp"

namespace braindec::stats {
namespace {

constexpr int kMaxIterations = 300;
constexpr double kTolerance = 1e-15;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kTolerance) return h;
  }
  throw Error(fmt::format("incomplete beta continued fraction did not converge (a={}, b={}, x={})", a, b, x));
}

// I_x(a, b) with y = 1 - x supplied separately so callers can avoid
// cancellation when x is close to 1.
double incomplete_beta_split(double a, double b, double x, double y) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error("incomplete beta: shape parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

// Half of I_{df/(df+t^2)}(df/2, 1/2): the probability mass beyond |t|.
double t_tail(double t, double df) {
  const double t2 = t * t;
  const double denom = df + t2;
  return 0.5 * incomplete_beta_split(0.5 * df, 0.5, df / denom, t2 / denom);
}

void require_finite(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(fmt::format("{}: non-finite input", what));
  }
}

bool is_constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) throw Error("mean of empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) throw Error("standard deviation needs at least 2 values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double sem(std::span<const double> x) { return sample_sd(x) / std::sqrt(static_cast<double>(x.size())); }

std::vector<double> fractional_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    // positions i..j (0-based) hold ranks i+1..j+1
    const double shared = 0.5 * static_cast<double>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

TestResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(fmt::format("spearman: length mismatch ({} vs {})", x.size(), y.size()));
  if (x.size() < 4) throw Error("spearman: need at least 4 observations");
  require_finite(x, "spearman");
  require_finite(y, "spearman");
  if (is_constant(x) || is_constant(y)) throw Error("spearman: undefined correlation for a constant input vector");

  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  const double rho = pearson(rx, ry);
  const double df = static_cast<double>(x.size()) - 2.0;

  TestResult r;
  r.statistic = rho;
  r.df = df;
  r.sidedness = Sidedness::two_sided;
  if (std::fabs(rho) >= 1.0) {
    r.p_value = 0.0;
  } else {
    const double t = rho * std::sqrt(df / (1.0 - rho * rho));
    r.p_value = 2.0 * t_sf(std::fabs(t), df);
  }
  return r;
}

TestResult one_sample_t(std::span<const double> x, double mu0, Sidedness sidedness) {
  if (x.size() < 2) throw Error("one-sample t-test needs at least 2 values");
  require_finite(x, "one-sample t-test");
  const double sd = sample_sd(x);
  if (!(sd > 0.0)) throw Error("one-sample t-test: zero variance");
  const double n = static_cast<double>(x.size());
  TestResult r;
  r.statistic = (mean(x) - mu0) / (sd / std::sqrt(n));
  r.df = n - 1.0;
  r.sidedness = sidedness;
  r.p_value = sidedness == Sidedness::one_sided_greater ? t_sf(r.statistic, r.df)
                                                        : std::min(1.0, 2.0 * t_sf(std::fabs(r.statistic), r.df));
  return r;
}

TestResult two_sample_t_summary(double mean1, double sem1, int n1, double mean2, double sem2, int n2) {
  if (n1 < 2 || n2 < 2) throw Error("two-sample t-test needs at least 2 observations per group");
  if (!(sem1 > 0.0) || !(sem2 > 0.0)) throw Error("two-sample t-test needs positive standard errors");
  const double var1 = sem1 * sem1 * n1;
  const double var2 = sem2 * sem2 * n2;
  const double df = static_cast<double>(n1 + n2 - 2);
  const double pooled = ((n1 - 1) * var1 + (n2 - 1) * var2) / df;
  TestResult r;
  r.statistic = (mean1 - mean2) / std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
  r.df = df;
  r.sidedness = Sidedness::two_sided;
  r.p_value = std::min(1.0, 2.0 * t_sf(std::fabs(r.statistic), df));
  return r;
}

double incomplete_beta(double a, double b, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error("incomplete beta: x outside [0, 1]");
  return incomplete_beta_split(a, b, x, 1.0 - x);
}

double t_sf(double t, double df) {
  if (!(df > 0.0)) throw Error("t distribution: degrees of freedom must be positive");
  if (std::isnan(t)) throw Error("t distribution: NaN statistic");
  if (t == 0.0) return 0.5;
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  const double tail = t_tail(t, df);
  return t > 0.0 ? tail : 1.0 - tail;
}

double t_cdf(double t, double df) {
  if (!(df > 0.0)) throw Error("t distribution: degrees of freedom must be positive");
  if (std::isnan(t)) throw Error("t distribution: NaN statistic");
  if (t == 0.0) return 0.5;
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = t_tail(t, df);
  return t < 0.0 ? tail : 1.0 - tail;
}

}  // namespace braindec::stats
