#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spikecode/metrics.hpp"

using namespace spikecode;

namespace {

double pairwise_tau(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = (x[i] > x[j]) - (x[i] < x[j]);
      const double b = (y[i] > y[j]) - (y[i] < y[j]);
      s += a * b;
    }
  }
  return s / (0.5 * n * (n - 1));
}

}  // namespace

TEST(Kendall, PerfectAndReversed) {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> rev{5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(kendall_tau(x, x), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau(x, rev), -1.0);
}

TEST(Kendall, HandCountedFiveSamples) {
  // Pairs: concordant 8, discordant 2 -> (8 - 2) / 10.
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y{2, 1, 3, 5, 4};
  EXPECT_DOUBLE_EQ(kendall_tau(x, y), 0.6);
  EXPECT_EQ(kendall_score(x, y), 6);
}

TEST(Kendall, TiesCountAsNeither) {
  std::vector<double> x{1, 1, 2};
  std::vector<double> y{1, 2, 3};
  EXPECT_DOUBLE_EQ(kendall_tau(x, y), 2.0 / 3.0);
}

TEST(Kendall, MatchesPairwiseOnRandomData) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> small(0, 6);
  std::uniform_int_distribution<std::size_t> len(2, 200);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = len(rng);
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = small(rng);
      y[i] = rep % 2 ? small(rng) : std::normal_distribution<double>()(rng);
    }
    ASSERT_NEAR(kendall_tau(x, y), pairwise_tau(x, y), 1e-12);
  }
}

TEST(Kendall, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  std::vector<double> x(50);
  std::vector<double> y(50);
  for (std::size_t i = 0; i < 50; ++i) {
    x[i] = g(rng);
    y[i] = x[i] + g(rng);
  }
  std::vector<double> ty(50);
  for (std::size_t i = 0; i < 50; ++i) ty[i] = std::exp(3.0 * y[i]) - 7.0;
  EXPECT_DOUBLE_EQ(kendall_tau(x, y), kendall_tau(x, ty));
}

TEST(Kendall, LengthMismatchThrows) {
  std::vector<double> a{1, 2};
  std::vector<double> b{1};
  EXPECT_THROW(kendall_tau(a, b), std::invalid_argument);
}

TEST(Pearson, AffineInvariance) {
  std::vector<double> x{1, 2, 4, 8, 3};
  std::vector<double> y{2, 1, 5, 9, 2};
  std::vector<double> ay(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) ay[i] = 3.0 * y[i] + 11.0;
  EXPECT_NEAR(pearson_r(x, y), pearson_r(x, ay), 1e-14);
  EXPECT_NEAR(pearson_r(x, x), 1.0, 1e-15);
}

TEST(Pearson, ZeroVarianceGivesZero) {
  std::vector<double> x{1, 1, 1};
  std::vector<double> y{1, 2, 3};
  EXPECT_EQ(pearson_r(x, y), 0.0);
}

TEST(Spearman, UsesAverageRanks) {
  std::vector<double> x{10, 20, 20, 40};
  const auto r = average_ranks(x);
  EXPECT_EQ(r, (std::vector<double>{1, 2.5, 2.5, 4}));
  std::vector<double> y{1, 2, 3, 4};
  std::vector<double> cube{1, 8, 27, 64};
  EXPECT_NEAR(spearman_rho(y, cube), 1.0, 1e-15);
}

TEST(Summary, MedianAndStddev) {
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
  std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_NEAR(stddev(v), std::sqrt(32.0 / 7.0), 1e-12);
}
