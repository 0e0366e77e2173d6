#pragma once

#include <span>
#include <vector>

namespace fxres {

double mean(std::span<const double> x);

// sample variance / SD, divisor n-1
double sample_variance(std::span<const double> x);
double sample_sd(std::span<const double> x);

double median(std::vector<double> x);

// Quantile with linear interpolation between order statistics (Hyndman-Fan
// type 7, the R/NumPy default). p in [0, 1]. Input need not be sorted.
double quantile_type7(std::vector<double> x, double p);

// Standard normal CDF and quantile (Acklam's rational approximation,
// refined by one Halley step; |error| < 1e-15 over (0,1)).
double normal_cdf(double z);
double normal_quantile(double p);

// Upper-tail probability of a chi-squared variate with k dof.
double chi2_survival(double x, int dof);

// Regularized incomplete gamma functions P(a,x), Q(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

} // namespace fxres
