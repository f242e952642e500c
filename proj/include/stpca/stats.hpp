#pragma once

#include <cstddef>
#include <span>

namespace stpca {

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
/// Pearson correlation of two equal-length samples.
double correlation(std::span<const double> x, std::span<const double> y);

double normal_cdf(double x);
/// Upper-tail quantile: z with P(N(0,1) > z) = p.
double normal_upper_quantile(double p);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};
/// One-sample Kolmogorov-Smirnov test of x against N(mu, sd^2).
KsResult ks_test_normal(std::span<const double> x, double mu = 0.0, double sd = 1.0);

}  // namespace stpca
