#pragma once

namespace crashml {

/// Inverse standard normal CDF (Acklam's rational approximation,
/// relative error below 1.2e-9). p must lie in (0, 1).
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

/// CDF of the chi-squared distribution with df degrees of freedom.
double chi_squared_cdf(double x, double df);

/// Upper-alpha quantile of the chi-squared distribution: the x with
/// P(X > x) = alpha. Seeded by the Wilson-Hilferty cube-root normal
/// approximation and polished by Newton steps on the exact CDF.
double chi_squared_upper_quantile(double df, double alpha);

}  // namespace crashml
