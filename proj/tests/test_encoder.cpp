#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "spikecode/adm.hpp"
#include "spikecode/encoder.hpp"
#include "spikecode/signals.hpp"

using namespace spikecode;

TEST(Encode, OddCount) {
  const auto e = encode(PopulationResponse::from_times(std::vector<double>{0.002, 0.004, 0.006}));
  EXPECT_NEAR(e.y_star[0], -0.002, 1e-15);
  EXPECT_EQ(e.y_star[1], 0.0);
  EXPECT_NEAR(e.y_star[2], 0.002, 1e-15);
  EXPECT_EQ(e.n_fired, 3u);
  EXPECT_DOUBLE_EQ(e.median_s, 0.004);
}

TEST(Encode, EvenCountWithSilent) {
  const auto e = encode(PopulationResponse::from_times(std::vector<double>{0.002, 0.004, kNoSpike}));
  EXPECT_NEAR(e.y_star[0], -0.001, 1e-15);
  EXPECT_NEAR(e.y_star[1], 0.001, 1e-15);
  EXPECT_EQ(e.y_star[2], 0.0);
  EXPECT_EQ(e.fired, (std::vector<bool>{true, true, false}));
}

TEST(Encode, AllSilent) {
  const auto e = encode(PopulationResponse::silent(4));
  EXPECT_EQ(e.y_star, std::vector<double>(4, 0.0));
  EXPECT_EQ(e.n_fired, 0u);
}

TEST(EncodeProperty, MedianSigns) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 0.2);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 1 + rep % 40;
    std::vector<double> t(n);
    for (auto& x : t) x = u(rng) < 0.05 ? kNoSpike : u(rng);
    const auto e = encode(PopulationResponse::from_times(t));
    long neg = 0;
    long pos = 0;
    long zero = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!e.fired[i]) continue;
      neg += e.y_star[i] < 0;
      pos += e.y_star[i] > 0;
      zero += e.y_star[i] == 0;
    }
    if (e.n_fired % 2 == 1) {
      EXPECT_EQ(zero, 1);
      EXPECT_EQ(neg, pos);
    } else if (e.n_fired > 0) {
      EXPECT_EQ(neg, pos);
    }
  }
}

TEST(ShiftCheck, Examples) {
  const auto r = PopulationResponse::from_times(std::vector<double>{0.002, 0.004, 0.006});
  EXPECT_TRUE(global_shift_check(r, 0.0));
  EXPECT_TRUE(global_shift_check(r, 0.005));
  // Per-trial encoding does not care that the shift leaves any window.
  EXPECT_TRUE(global_shift_check(r, 0.5));
}

namespace {

std::vector<NeuronSpike> to_spikes(const PopulationResponse& r) {
  std::vector<NeuronSpike> s;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r.fired[i]) s.push_back({i, r.first_spike_s[i]});
  }
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.time_s < b.time_s; });
  return s;
}

}  // namespace

TEST(Stream, SilentNeverEmits) {
  EXPECT_TRUE(run_stream({}, 8, 0.05, 1.0, 1e-3).empty());
}

TEST(Stream, SingleBurstEqualsBatch) {
  std::vector<double> t(16);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.1 + 0.002 * static_cast<double>((i * 7) % 16);
  const auto r = PopulationResponse::from_times(t);
  const auto em = run_stream(to_spikes(r), 16, 0.05, 0.5, 1e-3);
  ASSERT_EQ(em.size(), 1u);
  EXPECT_EQ(em[0].encoding.y_star, encode(r).y_star);
}

TEST(Stream, SixSeparatedBursts) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 0.03);
  std::vector<NeuronSpike> spikes;
  for (int b = 0; b < 6; ++b) {
    for (std::size_t i = 0; i < 32; ++i) spikes.push_back({i, 0.2 * b + 0.05 + u(rng)});
  }
  std::sort(spikes.begin(), spikes.end(), [](const auto& a, const auto& b) { return a.time_s < b.time_s; });
  EXPECT_EQ(run_stream(spikes, 32, 0.05, 1.4, 2e-4).size(), 6u);
}

TEST(Stream, NetworkOnConcatenatedStimuli) {
  // Six DoubleGauss stimuli separated by silence, fed as one stream.
  const auto spec = family_spec(SignalFamily::DoubleGauss);
  const auto params = sample_params(spec, 6, 4);
  TimeGrid g;
  Waveform x;
  for (const auto& p : params) {
    const auto w = synthesize({spec, p, g});
    x.insert(x.end(), w.begin(), w.end());
    x.insert(x.end(), 1000, 0.0);
  }
  const auto stream = adm_encode(x, g.fs_hz, 0.1);
  auto cfg = init_config(32, {0.02, 0.02, 0.02}, 3);
  for (auto& row : cfg.weights) row = {3, 0, 0, 1};
  const double duration = static_cast<double>(x.size()) / g.fs_hz;
  const auto spikes = simulate_continuous(cfg, stream, duration, g.dt(), 0.2);
  EXPECT_EQ(run_stream(spikes, 32, 0.05, duration, g.dt()).size(), 6u);
  EXPECT_EQ(run_stream(spikes, 32, g.duration_s, duration, g.dt()).size(), 6u);
}

TEST(Stream, StateAccessorsAndErrors) {
  StreamState st(4, 0.05);
  std::vector<NeuronSpike> a{{0, 0.01}, {1, 0.012}};
  EXPECT_FALSE(stream_step(st, a, 0.02).has_value());
  EXPECT_EQ(st.rolling_count(), 2u);
  EXPECT_THROW(st.step({}, 0.01), std::invalid_argument);
  std::optional<Encoding> out;
  for (double now = 0.03; now < 0.2 && !out; now += 0.005) out = st.step({}, now);
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(out->n_fired, 2u);
  EXPECT_TRUE(st.triggered());
}
