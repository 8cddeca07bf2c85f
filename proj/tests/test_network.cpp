#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "spikecode/metrics.hpp"
#include "spikecode/network.hpp"

using namespace spikecode;

namespace {

NetworkConfig single_neuron(double tau_mem, double tau_syn, int w, double q = 30.0) {
  NetworkConfig c;
  c.taus = {tau_mem, tau_syn, tau_syn};
  c.eta = {EtaRow{0, 0, 0}};
  c.weights = {WeightRow{w, 0, 0, 0}};
  c.q = q;
  return c;
}

SpikeStream up_stream(std::vector<double> times) {
  SpikeStream s;
  s.up_times = std::move(times);
  s.duration_s = 0.2;
  return s;
}

SpikeStream random_stream(std::uint64_t seed, std::size_t events, double span = 0.15) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, span);
  SpikeStream s;
  for (std::size_t i = 0; i < events; ++i) (i % 3 ? s.up_times : s.dn_times).push_back(u(rng));
  std::sort(s.up_times.begin(), s.up_times.end());
  std::sort(s.dn_times.begin(), s.dn_times.end());
  s.duration_s = 0.2;
  return s;
}

// V(t) for one event at t0: J (e^{-u/ts} - e^{-u/tm}) / (1/tm - 1/ts).
double analytic_v(double j, double tm, double ts, double u) {
  return u <= 0 ? 0.0 : j * (std::exp(-u / ts) - std::exp(-u / tm)) / (1.0 / tm - 1.0 / ts);
}

}  // namespace

TEST(InitConfig, HomogeneousLimitAndDeterminism) {
  const auto c = init_config(20, {0.01, 0.02, 0.03}, 4, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(c.neuron_taus(i), (TimeConstants{0.01, 0.02, 0.03}));
  EXPECT_EQ(init_config(20, {}, 9), init_config(20, {}, 9));
  EXPECT_NE(init_config(20, {}, 9), init_config(20, {}, 10));
  for (const auto& row : init_config(200, {}, 1).weights) {
    for (int w : row) {
      EXPECT_GE(w, 0);
      EXPECT_LE(w, 2);
    }
  }
}

TEST(InitConfig, EtaStatistics) {
  const auto c = init_config(10000, {}, 7);
  std::vector<double> e;
  for (const auto& row : c.eta) {
    for (double v : row) {
      e.push_back(v);
      ASSERT_GT(1.0 + v, kMinHeterogeneityFactor);
    }
  }
  EXPECT_NEAR(stddev(e), 0.2, 0.01);
  EXPECT_NO_THROW(validate(c));
}

TEST(Validate, RejectsBadConfigs) {
  auto c = init_config(3, {}, 1);
  c.weights[1][2] = 65;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = init_config(3, {}, 1);
  c.eta[0][0] = -1.5;
  EXPECT_THROW(validate(c), std::invalid_argument);
}

TEST(Simulate, ZeroWeightsSilent) {
  auto c = init_config(10, {}, 1);
  for (auto& row : c.weights) row = {0, 0, 0, 0};
  const auto r = simulate(c, random_stream(1, 60), {});
  EXPECT_EQ(r.n_fired(), 0u);
  for (double t : r.first_spike_s) EXPECT_EQ(t, kNoSpike);
}

TEST(Simulate, SingleEventMatchesAnalytic) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> tau(0.005, 0.04);
  std::uniform_real_distribution<double> at(0.0, 0.05);
  int checked = 0;
  while (checked < 30) {
    const double tm = tau(rng);
    const double ts = tau(rng);
    const int w = 10;
    const double t0 = at(rng);
    const double jump = 30.0 * w;
    // Bracket the crossing on a fine grid, then bisect.
    double lo = t0;
    double hi = -1.0;
    for (double t = t0; t < 0.199; t += 1e-6) {
      if (analytic_v(jump, tm, ts, t - t0) >= 1.0) {
        hi = t;
        break;
      }
      lo = t;
    }
    if (hi < 0) continue;
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      (analytic_v(jump, tm, ts, mid - t0) >= 1.0 ? hi : lo) = mid;
    }
    const auto r = simulate(single_neuron(tm, ts, w), up_stream({t0}), {0.2, 2e-4});
    ASSERT_TRUE(r.fired[0]);
    EXPECT_LT(std::abs(r.first_spike_s[0] - hi), 2e-4);
    ++checked;
  }
}

TEST(Simulate, DtDoublingStable) {
  const auto c = init_config(32, {}, 5);
  const auto s = random_stream(2, 80);
  const double dt0 = 2e-4;
  const auto ref = simulate(c, s, {0.2, dt0 / 4});
  const auto a = simulate(c, s, {0.2, dt0});
  const auto b = simulate(c, s, {0.2, 2 * dt0});
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!a.fired[i] || !b.fired[i]) continue;
    EXPECT_LT(std::abs(a.first_spike_s[i] - b.first_spike_s[i]), 2 * dt0);
    if (ref.fired[i]) EXPECT_LT(std::abs(a.first_spike_s[i] - ref.first_spike_s[i]), dt0);
  }
}

TEST(Simulate, Superposition) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto c = init_config(4, {0.015, 0.03, 0.01}, seed);
    for (auto& row : c.weights) row = {3, 1, 2, 4};
    const auto a = random_stream(100 + seed, 20);
    const auto b = random_stream(200 + seed, 15);
    SpikeStream ab = a;
    ab.up_times.insert(ab.up_times.end(), b.up_times.begin(), b.up_times.end());
    ab.dn_times.insert(ab.dn_times.end(), b.dn_times.begin(), b.dn_times.end());
    std::sort(ab.up_times.begin(), ab.up_times.end());
    std::sort(ab.dn_times.begin(), ab.dn_times.end());
    for (std::size_t i = 0; i < c.size(); ++i) {
      const auto va = membrane_trace(c, a, i, {});
      const auto vb = membrane_trace(c, b, i, {});
      const auto vab = membrane_trace(c, ab, i, {});
      ASSERT_EQ(vab.size(), va.size());
      for (std::size_t k = 0; k < vab.size(); ++k) {
        ASSERT_NEAR(vab[k], va[k] + vb[k], 1e-9 * std::max(1.0, std::abs(vab[k])));
      }
    }
  }
}

TEST(Simulate, TimeShiftEquivariance) {
  const auto c = init_config(32, {}, 8);
  const auto s = random_stream(6, 60, 0.1);
  const double shift = 50 * 2e-4;
  SpikeStream t = s;
  for (double& x : t.up_times) x += shift;
  for (double& x : t.dn_times) x += shift;
  const auto a = simulate(c, s, {0.2, 2e-4});
  const auto b = simulate(c, t, {0.2 + shift, 2e-4});
  for (std::size_t i = 0; i < c.size(); ++i) {
    ASSERT_EQ(a.fired[i], b.fired[i]);
    if (a.fired[i]) EXPECT_NEAR(b.first_spike_s[i] - a.first_spike_s[i], shift, 2e-4);
  }
}

TEST(Simulate, ExcitatoryWeightMonotone) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 40; ++rep) {
    auto c = init_config(8, {0.02, 0.02, 0.02}, rep);
    auto s = random_stream(rep, 40);
    s.dn_times.clear();
    const auto base = simulate(c, s, {});
    for (std::size_t i = 0; i < c.size(); ++i) {
      auto up = c;
      up.weights[i][kPlusUp] += 3;
      const auto r = simulate(up, s, {});
      if (base.fired[i]) {
        ASSERT_TRUE(r.fired[i]);
        ASSERT_LE(r.first_spike_s[i], base.first_spike_s[i]);
      }
    }
  }
}

TEST(Simulate, DeterministicAndWithinWindow) {
  const auto c = init_config(64, {}, 2);
  const auto s = random_stream(3, 100);
  const auto a = simulate(c, s, {});
  const auto b = simulate(c, s, {});
  EXPECT_EQ(a.first_spike_s, b.first_spike_s);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.fired[i], std::isfinite(a.first_spike_s[i]));
    if (a.fired[i]) {
      EXPECT_GE(a.first_spike_s[i], 0.0);
      EXPECT_LT(a.first_spike_s[i], 0.2);
    }
  }
}

TEST(Simulate, SubsetMatchesFull) {
  const auto c = init_config(16, {}, 4);
  const auto s = random_stream(9, 70);
  const auto full = simulate(c, s, {});
  auto part = PopulationResponse::silent(16);
  std::vector<std::size_t> idx{1, 5, 9};
  simulate_neurons(c, s, {}, idx, part);
  for (std::size_t i : idx) EXPECT_EQ(part.first_spike_s[i], full.first_spike_s[i]);
}

TEST(Continuous, HoldSeparatesSpikes) {
  const auto c = single_neuron(0.01, 0.01, 20);
  std::vector<double> ev;
  for (int k = 0; k < 10; ++k) ev.push_back(0.05 * k);
  SpikeStream s = up_stream(ev);
  const auto spikes = simulate_continuous(c, s, 0.5, 2e-4, 0.03);
  ASSERT_GE(spikes.size(), 5u);
  for (std::size_t k = 1; k < spikes.size(); ++k) EXPECT_GE(spikes[k].time_s - spikes[k - 1].time_s, 0.03 - 1e-12);
  const auto first = simulate(c, s, {0.5, 2e-4});
  EXPECT_NEAR(spikes.front().time_s, first.first_spike_s[0], 1e-12);
}

TEST(Jitter, IdentityAndSpread) {
  std::vector<double> times(10000, 0.1);
  times[3] = kNoSpike;
  const auto r = PopulationResponse::from_times(times);
  const auto same = apply_jitter(r, 0.0, 3);
  EXPECT_EQ(same.first_spike_s, r.first_spike_s);
  const auto j = apply_jitter(r, 1e-3, 3);
  EXPECT_FALSE(j.fired[3]);
  std::vector<double> d;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j.fired[i]) d.push_back(j.first_spike_s[i] - 0.1);
  }
  EXPECT_NEAR(stddev(d), 1e-3, 3e-5);
}

TEST(Delete, FloorArithmetic) {
  std::vector<double> times{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1, kNoSpike};
  const auto r = PopulationResponse::from_times(times);
  EXPECT_EQ(delete_spikes(r, 0.0, 1).first_spike_s, r.first_spike_s);
  EXPECT_EQ(delete_spikes(r, 1.0, 1).n_fired(), 0u);
  const auto half = delete_spikes(r, 0.5, 1);
  EXPECT_EQ(half.n_fired(), 5u);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (half.fired[i]) EXPECT_EQ(half.first_spike_s[i], r.first_spike_s[i]);
  }
  EXPECT_EQ(delete_spikes(r, 0.25, 2).n_fired(), 8u);
}

TEST(Homogenize, Arms) {
  auto c = init_config(128, {}, 3);
  EXPECT_EQ(homogenize(c, 0, 0, 1), c);
  const auto full = homogenize(c, 100, 100, 1);
  for (std::size_t i = 1; i < full.size(); ++i) {
    EXPECT_EQ(full.weights[i], full.weights[0]);
    EXPECT_EQ(full.eta[i], full.eta[0]);
  }
  // Rows far from the mean so every replaced row changes.
  for (std::size_t i = 0; i < c.size(); ++i) c.weights[i] = i % 2 ? WeightRow{0, 0, 0, 0} : WeightRow{10, 10, 10, 10};
  const auto half = homogenize(c, 50, 0, 7);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (half.weights[i] != c.weights[i]) {
      ++changed;
      EXPECT_EQ(half.weights[i], (WeightRow{5, 5, 5, 5}));
    }
  }
  EXPECT_EQ(changed, 64u);
  EXPECT_EQ(half.eta, c.eta);
}
