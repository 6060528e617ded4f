#pragma once

#include <span>

namespace spillover::stats {

double mean(std::span<const double> x);
/// Sample variance with denominator n - 1.
double variance(std::span<const double> x);
/// Linearly interpolated quantile (the usual "type 7" definition).
double quantile(std::span<const double> x, double q);

double normal_cdf(double x);
/// Upper tail P(X > x) for X ~ chi-square(df).
double chi_square_sf(double x, double df);

}  // namespace spillover::stats
