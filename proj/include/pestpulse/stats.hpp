#ifndef PESTPULSE_STATS_HPP
#define PESTPULSE_STATS_HPP

#include <span>

namespace pestpulse {

double mean(std::span<const double> values);

// Population variance (divides by n).
double population_variance(std::span<const double> values);

// Standard normal CDF.
double normal_cdf(double x);

// Inverse standard normal CDF, accurate to better than 1e-9 over (0, 1).
// Rational approximation refined with one Halley step on erfc.
double normal_quantile(double p);

}  // namespace pestpulse

#endif  // PESTPULSE_STATS_HPP
