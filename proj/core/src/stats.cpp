#include "intent/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "intent/error.hpp"

namespace intent::stats {

namespace {

constexpr double kLn10 = std::numbers::ln10;

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double dm = static_cast<double>(m);
    const double m2 = 2.0 * dm;
    double aa = dm * (b - dm) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + dm) * (qab + dm) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error(ErrorKind::Numerical, "incomplete beta continued fraction did not converge");
}

// log(1 - exp(v)) for v <= 0.
double log1m_exp(double v) {
  if (v > -std::numbers::ln2) return std::log(-std::expm1(v));
  return std::log1p(-std::exp(v));
}

}  // namespace

double log_ibeta(double a, double b, double x, double y) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::Numerical, "incomplete beta needs a, b > 0");
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  if (y <= 0.0) return 0.0;
  // ln of x^a (1-x)^b / B(a,b), shared by both branches.
  const double front = a * std::log(x) + b * std::log(y) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front + std::log(beta_continued_fraction(a, b, x)) - std::log(a);
  }
  const double log_complement = front + std::log(beta_continued_fraction(b, a, y)) - std::log(b);
  return log1m_exp(log_complement);
}

double t_sf_log10(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorKind::Numerical, "t distribution needs df > 0");
  if (std::isnan(t)) throw Error(ErrorKind::Numerical, "t statistic is NaN");
  if (t == 0.0) return std::log10(0.5);
  if (std::isinf(t)) return t > 0 ? -std::numeric_limits<double>::infinity() : 0.0;
  const double t2 = t * t;
  // P(|T| > |t|) = I_{df/(df+t^2)}(df/2, 1/2).
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  const double log_two_tail = log_ibeta(0.5 * df, 0.5, x, y);
  const double log_upper = std::log(0.5) + log_two_tail;
  if (t > 0.0) return log_upper / kLn10;
  return log1m_exp(log_upper) / kLn10;
}

namespace {

TTestResult finish(double t, double df, Alternative alt, double alpha) {
  TTestResult r;
  r.t_statistic = t;
  r.degrees_of_freedom = df;
  if (alt == Alternative::Greater) {
    r.log10_p = t_sf_log10(t, df);
  } else {
    r.log10_p = std::min(0.0, std::log10(2.0) + t_sf_log10(std::abs(t), df));
  }
  r.p_value = std::pow(10.0, r.log10_p);
  r.significant = r.p_value < alpha;
  return r;
}

}  // namespace

TTestResult t_test_vs_random(double mean, double std, int n, double alpha) {
  if (!(std > 0.0)) throw Error(ErrorKind::Numerical, "t-test against chance needs std > 0");
  if (n < 2) throw Error(ErrorKind::Numerical, "t-test against chance needs n >= 2");
  const double nn = static_cast<double>(n);
  const double t = (mean - 0.5) / (std * std::sqrt(2.0 / nn));
  return finish(t, 2.0 * nn - 2.0, Alternative::Greater, alpha);
}

TTestResult welch_t_test(double mean1, double std1, int n1, double mean2, double std2, int n2, Alternative alt,
                         double alpha) {
  if (!(std1 > 0.0) || !(std2 > 0.0)) throw Error(ErrorKind::Numerical, "Welch test needs positive stds");
  if (n1 < 2 || n2 < 2) throw Error(ErrorKind::Numerical, "Welch test needs n >= 2 per sample");
  const double v1 = std1 * std1 / static_cast<double>(n1);
  const double v2 = std2 * std2 / static_cast<double>(n2);
  const double t = (mean1 - mean2) / std::sqrt(v1 + v2);
  const double df = (v1 + v2) * (v1 + v2) /
                    (v1 * v1 / static_cast<double>(n1 - 1) + v2 * v2 / static_cast<double>(n2 - 1));
  return finish(t, df, alt, alpha);
}

RegressionResult linregress(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::Numerical, "regression needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::Numerical, "regression needs at least two distinct x values");
  RegressionResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (r.intercept + r.slope * x[i]);
    ss_res += e * e;
  }
  r.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return r;
}

}  // namespace intent::stats
