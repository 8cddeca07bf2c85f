#pragma once

#include <span>
#include <vector>

namespace spikecode {

/// Kendall rank correlation, (C - D) / (n (n - 1) / 2). Tied pairs count as
/// neither concordant nor discordant. O(n log n) (Knight's merge-sort method).
/// Returns 0 for fewer than two observations.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// Number of concordant minus discordant pairs.
long long kendall_score(std::span<const double> x, std::span<const double> y);

/// Pearson product-moment correlation. Returns 0 when either side has zero variance.
double pearson_r(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation (Pearson on average ranks).
double spearman_rho(std::span<const double> x, std::span<const double> y);

/// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> x);

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator); 0 for n < 2.
double stddev(std::span<const double> x);
double median(std::vector<double> x);

bool has_variance(std::span<const double> x);

}  // namespace spikecode
