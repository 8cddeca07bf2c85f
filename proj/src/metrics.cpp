#include "spikecode/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spikecode {

namespace {

void check_sizes(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("correlation inputs must have equal length");
  }
}

// Counts ties within runs of equal values of a sorted sequence.
template <typename Eq>
long long tied_pairs(std::span<const std::size_t> order, Eq equal) {
  long long ties = 0;
  long long run = 1;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (equal(order[i - 1], order[i])) {
      ++run;
    } else {
      ties += run * (run - 1) / 2;
      run = 1;
    }
  }
  ties += run * (run - 1) / 2;
  return ties;
}

// Merge sort of idx by y, counting the number of strict inversions.
long long merge_count(std::vector<std::size_t>& idx, std::vector<std::size_t>& buf,
                      std::span<const double> y, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  long long swaps = merge_count(idx, buf, y, lo, mid) + merge_count(idx, buf, y, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (y[idx[j]] < y[idx[i]]) {
      swaps += static_cast<long long>(mid - i);
      buf[k++] = idx[j++];
    } else {
      buf[k++] = idx[i++];
    }
  }
  while (i < mid) buf[k++] = idx[i++];
  while (j < hi) buf[k++] = idx[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            idx.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

long long kendall_score(std::span<const double> x, std::span<const double> y) {
  check_sizes(x, y);
  const std::size_t n = x.size();
  if (n < 2) return 0;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  const long long n0 = static_cast<long long>(n) * static_cast<long long>(n - 1) / 2;
  const long long ties_x = tied_pairs(idx, [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
  const long long ties_xy =
      tied_pairs(idx, [&](std::size_t a, std::size_t b) { return x[a] == x[b] && y[a] == y[b]; });

  std::vector<std::size_t> buf(n);
  const long long swaps = merge_count(idx, buf, y, 0, n);
  const long long ties_y = tied_pairs(idx, [&](std::size_t a, std::size_t b) { return y[a] == y[b]; });

  // Pairs untied in both coordinates split into concordant and discordant;
  // discordant ones are exactly the inversions left after sorting by (x, y).
  const long long untied = n0 - ties_x - ties_y + ties_xy;
  return untied - 2 * swaps;
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  check_sizes(x, y);
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return static_cast<double>(kendall_score(x, y)) / pairs;
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double median(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("median of empty sequence");
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 == 1 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

bool has_variance(std::span<const double> x) {
  return std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>{}) != x.end();
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  check_sizes(x, y);
  if (x.size() < 2 || !has_variance(x) || !has_variance(y)) return 0.0;
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  check_sizes(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson_r(rx, ry);
}

}  // namespace spikecode
