#pragma once

#include <span>
#include <vector>

namespace braindec::stats {

enum class Sidedness { one_sided_greater, two_sided };

struct TestResult {
  double statistic = 0.0;  // t or rho
  double p_value = 1.0;
  double df = 0.0;
  Sidedness sidedness = Sidedness::two_sided;
};

/// 1-based ranks; ties share the mean of the ranks they span.
std::vector<double> fractional_ranks(std::span<const double> x);

/// Spearman rank correlation with a two-sided p-value from the
/// t-approximation on n - 2 degrees of freedom. Requires n >= 4 and
/// non-constant inputs.
TestResult spearman(std::span<const double> x, std::span<const double> y);

/// t = (mean - mu0) / (sd / sqrt(n)), df = n - 1.
TestResult one_sample_t(std::span<const double> x, double mu0, Sidedness sidedness);

/// Pooled (equal-variance) independent-samples t-test computed from group
/// means and standard errors. Always two-sided.
TestResult two_sample_t_summary(double mean1, double sem1, int n1, double mean2, double sem2, int n2);

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
/// Throws Error if the fraction fails to converge within 300 iterations.
double incomplete_beta(double a, double b, double x);

/// Student-t cumulative distribution function.
double t_cdf(double t, double df);

/// Upper tail 1 - t_cdf(t, df), computed without cancellation.
double t_sf(double t, double df);

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> x);
double sem(std::span<const double> x);

}  // namespace braindec::stats
