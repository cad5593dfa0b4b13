#include "crashml/mathutil.hpp"

#include <cmath>
#include <limits>

#include "crashml/errors.hpp"

namespace crashml {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ArgumentError("normal_quantile: p must lie in (0, 1)");
  }

  // Acklam's rational approximation with one Halley refinement step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};

  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley step against the exact CDF via erfc.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

namespace {

// Lanczos log-gamma, good to ~1e-13 for a > 0.
double log_gamma(double a) {
  static const double g[] = {676.5203681218851,     -1259.1392167224028,
                             771.32342877765313,    -176.61502916214059,
                             12.507343278686905,    -0.13857109526572012,
                             9.9843695780195716e-6, 1.5056327351493116e-7};
  if (a < 0.5) {
    // Reflection.
    return std::log(M_PI / std::sin(M_PI * a)) - log_gamma(1.0 - a);
  }
  a -= 1.0;
  double x = 0.99999999999980993;
  for (int i = 0; i < 8; ++i) x += g[i] / (a + i + 1);
  const double t = a + 7.5;
  return 0.5 * std::log(2.0 * M_PI) + (a + 0.5) * std::log(t) - t + std::log(x);
}

double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Continued fraction for Q(a, x) = 1 - P(a, x), modified Lentz.
double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - log_gamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw ArgumentError("regularized_gamma_p: need a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double chi_squared_cdf(double x, double df) {
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(df / 2.0, x / 2.0);
}

double chi_squared_upper_quantile(double df, double alpha) {
  if (df < 1.0) throw ArgumentError("chi_squared_upper_quantile: df must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ArgumentError("chi_squared_upper_quantile: alpha must lie in (0, 1)");
  }

  // Wilson-Hilferty start: chi2 ~ df * (1 - 2/(9 df) + z sqrt(2/(9 df)))^3.
  const double z = normal_quantile(1.0 - alpha);
  const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
  double x = df * t * t * t;
  if (x <= 0.0) x = 1e-8;

  // Newton on F(x) = alpha_target using the exact CDF; the density is
  // f(x) = x^(df/2-1) e^(-x/2) / (2^(df/2) Gamma(df/2)).
  const double target = 1.0 - alpha;
  const double half = df / 2.0;
  const double log_norm = half * std::log(2.0) + std::lgamma(half);
  for (int iter = 0; iter < 40; ++iter) {
    const double f = chi_squared_cdf(x, df) - target;
    const double log_pdf = (half - 1.0) * std::log(x) - x / 2.0 - log_norm;
    const double pdf = std::exp(log_pdf);
    if (pdf <= 0.0) break;
    double step = f / pdf;
    // Keep iterates positive.
    if (step > x * 0.9) step = x * 0.9;
    x -= step;
    if (std::fabs(step) < 1e-12 * (1.0 + x)) break;
  }
  return x;
}

}  // namespace crashml
