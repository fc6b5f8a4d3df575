#pragma once

#include <span>
#include <vector>

namespace bsieve::stats {

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased
double std_error(std::span<const double> x);  // sqrt(var / n)
double median(std::span<const double> x);
double quantile(std::span<const double> x, double q);  // linear interpolation, q in [0, 1]

/// Two-sample Kolmogorov-Smirnov distance sup |F_a - F_b|, by merge scan over sorted copies.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace bsieve::stats
