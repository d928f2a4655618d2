#pragma once

#include <span>
#include <string>

namespace polarkit {

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value of a t statistic with nu degrees of freedom,
/// P(|T| >= |t|) = I_{nu/(nu+t^2)}(nu/2, 1/2).
double student_t_two_sided_p(double t, double nu);

/// Critical value t* with P(|T| >= t*) = alpha (e.g. alpha = 0.05 for a 95%
/// confidence interval).
double student_t_critical(double alpha, double nu);

/// Significance stars matching the report footnotes:
/// *** p<0.01, ** p<0.05, * p<0.1.
std::string significance_stars(double p);

/// Inverse of the standard normal CDF (Wichura's PPND16 rational
/// approximation, accurate to ~1e-15). Requires p in (0,1).
double inverse_normal_cdf(double p);

/// Sample Pearson correlation; 0 when either series is constant.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

} // namespace polarkit
