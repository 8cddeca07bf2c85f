#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "spikecode/adm.hpp"

using namespace spikecode;

namespace {

Waveform ramp(std::size_t n) {
  Waveform w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = static_cast<double>(k) / static_cast<double>(n - 1);
  return w;
}

Waveform smooth_random(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> freq(1.0, 20.0);
  std::uniform_real_distribution<double> phase(0.0, 6.28);
  Waveform w(n, 0.0);
  for (int c = 0; c < 4; ++c) {
    const double a = amp(rng);
    const double f = freq(rng);
    const double p = phase(rng);
    for (std::size_t k = 0; k < n; ++k) w[k] += a * std::sin(2 * M_PI * f * static_cast<double>(k) / 1000.0 + p);
  }
  return w;
}

}  // namespace

TEST(Adm, ConstantGivesNoEvents) {
  const auto s = adm_encode(Waveform(100, 0.7), 1000.0, 0.1);
  EXPECT_TRUE(s.empty());
  EXPECT_DOUBLE_EQ(s.x0, 0.7);
  EXPECT_DOUBLE_EQ(s.duration_s, 0.1);
}

TEST(Adm, RampCrossings) {
  // 0 -> 1 over 1 s at 1 kHz; delta 0.1: crossings of 0.1 j at t = 0.1 j.
  const auto s = adm_encode(ramp(1001), 1000.0, 0.1);
  ASSERT_EQ(s.up_times.size(), 10u);
  EXPECT_TRUE(s.dn_times.empty());
  for (std::size_t j = 0; j < 10; ++j) EXPECT_NEAR(s.up_times[j], 0.1 * (j + 1), 1.5e-3);
  EXPECT_TRUE(std::is_sorted(s.up_times.begin(), s.up_times.end()));
}

TEST(Adm, RampReconstructionWithinDelta) {
  const auto x = ramp(1001);
  const auto s = adm_encode(x, 1000.0, 0.1);
  const auto r = adm_reconstruct(s, x.size(), 1000.0);
  for (std::size_t k = 0; k < x.size(); ++k) ASSERT_LE(std::abs((x[k] - x[0]) - r[k]), 0.1 + 1e-12);
  EXPECT_NEAR(r.back(), 0.1 * (s.up_times.size() - s.dn_times.size()), 1e-12);
}

TEST(Adm, EmptyStreamReconstructsZero) {
  SpikeStream s;
  const auto r = adm_reconstruct(s, 50, 1000.0);
  EXPECT_EQ(r, Waveform(50, 0.0));
}

TEST(Adm, SignSymmetry) {
  auto x = smooth_random(500, 4);
  const double x0 = x[0];
  for (double& v : x) v -= x0;
  Waveform neg(x.size());
  std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
  const auto a = adm_encode(x, 1000.0, 0.05);
  const auto b = adm_encode(neg, 1000.0, 0.05);
  EXPECT_EQ(a.up_times, b.dn_times);
  EXPECT_EQ(a.dn_times, b.up_times);
}

TEST(Adm, InvalidInput) {
  EXPECT_THROW(adm_encode(Waveform{0, 1}, 1000.0, 0.0), std::invalid_argument);
  EXPECT_THROW(adm_encode(Waveform{0, NAN}, 1000.0, 0.1), std::invalid_argument);
}

TEST(AdmProperty, StreamInvariants) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto x = smooth_random(400, seed);
    const auto s = adm_encode(x, 1000.0, 0.05);
    for (const auto* list : {&s.up_times, &s.dn_times}) {
      ASSERT_TRUE(std::adjacent_find(list->begin(), list->end(), std::greater_equal<>()) == list->end());
      for (double t : *list) {
        ASSERT_GE(t, 0.0);
        ASSERT_LT(t, 0.4);
      }
    }
  }
}

TEST(AdmProperty, RoundTripBound) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto x = smooth_random(1000, seed);
    double max_step = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) max_step = std::max(max_step, std::abs(x[k] - x[k - 1]));
    const double delta = 1.5 * max_step + 1e-3;
    const auto r = adm_reconstruct(adm_encode(x, 1000.0, delta), x.size(), 1000.0);
    for (std::size_t k = 0; k < x.size(); ++k) ASSERT_LE(std::abs(x[k] - x[0] - r[k]), 2 * delta);
  }
}

TEST(AdmProperty, EventCountNonIncreasingInDelta) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto x = smooth_random(1000, seed);
    std::size_t prev = SIZE_MAX;
    for (double delta = 0.01; delta < 2.0; delta *= 1.3) {
      const auto count = adm_encode(x, 1000.0, delta).size();
      ASSERT_LE(count, prev) << "seed " << seed << " delta " << delta;
      prev = count;
    }
  }
}

TEST(AdmProperty, Causal) {
  const auto x = smooth_random(1000, 17);
  const auto full = adm_encode(x, 1000.0, 0.05);
  for (std::size_t cut : {100u, 377u, 800u}) {
    const auto part = adm_encode(std::span<const double>(x.data(), cut), 1000.0, 0.05);
    const double t_cut = static_cast<double>(cut) / 1000.0;
    std::vector<double> up;
    std::copy_if(full.up_times.begin(), full.up_times.end(), std::back_inserter(up), [&](double t) { return t < t_cut; });
    EXPECT_EQ(part.up_times, up);
  }
}

TEST(DeltaSearch, SingleCandidate) {
  std::vector<Waveform> ds{smooth_random(300, 1), smooth_random(300, 2), smooth_random(300, 3)};
  const std::vector<double> c{0.05};
  EXPECT_DOUBLE_EQ(optimize_delta(ds, c, 1000.0), 0.05);
}

TEST(DeltaSearch, SkipsDegenerateCandidates) {
  std::vector<Waveform> ds{smooth_random(300, 1), smooth_random(300, 2), smooth_random(300, 3)};
  // Larger than any dynamic range: all reconstructions are zero.
  EXPECT_TRUE(std::isnan(delta_score(ds, 100.0, 1000.0)));
  const std::vector<double> c{100.0, 0.05};
  EXPECT_DOUBLE_EQ(optimize_delta(ds, c, 1000.0), 0.05);
  const std::vector<double> only_bad{100.0};
  EXPECT_THROW(optimize_delta(ds, only_bad, 1000.0), std::runtime_error);
}

TEST(DeltaSearch, TwoIdenticalOneDistinct) {
  const auto a = smooth_random(300, 5);
  const auto b = smooth_random(300, 6);
  std::vector<Waveform> ds{a, a, b};
  const auto cands = default_delta_candidates(ds);
  EXPECT_EQ(cands.size(), 20u);
  const double d = optimize_delta(ds, cands, 1000.0);
  // Brute force: the chosen candidate scores the maximum.
  double best = -2.0;
  for (double c : cands) {
    const double s = delta_score(ds, c, 1000.0);
    if (!std::isnan(s)) best = std::max(best, s);
  }
  EXPECT_DOUBLE_EQ(delta_score(ds, d, 1000.0), best);
  EXPECT_GT(best, 0.99);
}
