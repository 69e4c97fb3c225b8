#pragma once

#include <span>

namespace intent::stats {

/// Natural log of the regularized incomplete beta I_x(a, b). `y` must equal
/// 1 - x; passing it separately avoids cancellation when x is close to 1.
double log_ibeta(double a, double b, double x, double y);

/// log10 of P(T > t) for Student's t with `df` degrees of freedom.
/// Stays accurate far into the tail (p down to ~1e-300).
double t_sf_log10(double t, double df);

enum class Alternative { Greater, TwoSided };

struct TTestResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
  double log10_p = 0.0;
  bool significant = false;
};

/// One-sided pooled two-sample test of (mean, std, n) against a pseudo-sample
/// with mean 0.5 and the same std and n: t = (mean - 0.5) / (std sqrt(2/n)),
/// df = 2n - 2, p = P(T > t).
TTestResult t_test_vs_random(double mean, double std, int n = 100, double alpha = 0.001);

/// Welch's unequal-variance test with Welch-Satterthwaite df.
/// Greater: p = P(T > t). TwoSided: p = 2 P(T > |t|), capped at 1.
TTestResult welch_t_test(double mean1, double std1, int n1, double mean2, double std2, int n2,
                         Alternative alt = Alternative::Greater, double alpha = 0.001);

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares with intercept; R^2 = 1 - SS_res / SS_tot.
RegressionResult linregress(std::span<const double> x, std::span<const double> y);

}  // namespace intent::stats
