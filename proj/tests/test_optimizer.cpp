#include <gtest/gtest.h>

#include <cmath>

#include "spikecode/optimizer.hpp"
#include "spikecode/random.hpp"

using namespace spikecode;

namespace {

double log_distance(const TimeConstants& a, const TimeConstants& b) {
  const double d0 = std::log(a.mem_s / b.mem_s);
  const double d1 = std::log(a.syn_plus_s / b.syn_plus_s);
  const double d2 = std::log(a.syn_minus_s / b.syn_minus_s);
  return std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
}

}  // namespace

TEST(TauSampling, ZeroRadiusReturnsCentre) {
  const TimeConstants c{0.01, 0.03, 0.02};
  for (const auto& t : sample_tau_candidates(c, 0.0, 10, 1)) EXPECT_EQ(t, c);
}

TEST(TauSampling, UniformInLogBall) {
  const TimeConstants c{0.02, 0.02, 0.02};
  const double r = 0.5;
  const auto cands = sample_tau_candidates(c, r, 20000, 7);
  std::size_t inner = 0;
  for (const auto& t : cands) {
    const double d = log_distance(t, c);
    EXPECT_LE(d, r + 1e-12);
    inner += d <= 0.5 * r;
  }
  // Volume fraction of the half-radius ball is 1/8.
  const double frac = static_cast<double>(inner) / static_cast<double>(cands.size());
  EXPECT_NEAR(frac, 0.125, 4.0 * std::sqrt(0.125 * 0.875 / 20000.0));
}

TEST(TauSampling, DeterministicAndClipped) {
  const TimeConstants c{2e-4, 0.4, 0.02};
  EXPECT_EQ(sample_tau_candidates(c, 0.9, 50, 3), sample_tau_candidates(c, 0.9, 50, 3));
  for (const auto& t : sample_tau_candidates(c, 0.9, 500, 3, 1e-4, 0.5)) {
    EXPECT_GE(t.mem_s, 1e-4);
    EXPECT_LE(t.syn_plus_s, 0.5);
  }
  EXPECT_THROW(sample_tau_candidates(c, 1.5, 1, 1), std::invalid_argument);
}

TEST(Mutation, TouchesOneNeuronWithBoundedSteps) {
  const auto cfg = init_config(32, {}, 4);
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto m = mutate_weights(cfg, s);
    const std::size_t idx = mutated_neuron(cfg, s);
    std::size_t changed_rows = 0;
    for (std::size_t i = 0; i < cfg.size(); ++i) {
      if (m.weights[i] == cfg.weights[i]) continue;
      ++changed_rows;
      EXPECT_EQ(i, idx);
      for (std::size_t c = 0; c < 4; ++c) {
        EXPECT_LE(std::abs(m.weights[i][c] - cfg.weights[i][c]), 4);
        EXPECT_GE(m.weights[i][c], 0);
      }
    }
    EXPECT_LE(changed_rows, 1u);
    EXPECT_EQ(m.taus, cfg.taus);
    EXPECT_EQ(m.eta, cfg.eta);
  }
}

TEST(Mutation, ClampsAtBounds) {
  auto cfg = init_config(4, {}, 1);
  for (auto& row : cfg.weights) row = {0, 0, 0, 0};
  bool moved = false;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto m = mutate_weights(cfg, s);
    for (const auto& row : m.weights) {
      for (int w : row) {
        EXPECT_GE(w, 0);
        moved = moved || w > 0;
      }
    }
  }
  EXPECT_TRUE(moved);
  for (auto& row : cfg.weights) row = {cfg.w_max, cfg.w_max, cfg.w_max, cfg.w_max};
  for (std::uint64_t s = 0; s < 200; ++s) {
    for (const auto& row : mutate_weights(cfg, s).weights) {
      for (int w : row) EXPECT_LE(w, cfg.w_max);
    }
  }
}

TEST(Optimize, MinimalBudgetKeepsInitialNetwork) {
  OptimizerOptions opts;
  opts.task.n_stimuli = 60;
  const auto r = optimize(SignalFamily::DoubleGauss, 8, {1, 1, 0}, 3, opts);
  const auto init = init_config(8, opts.initial_taus, derive_seed(3, 0x11e7), opts.sigma_het);
  EXPECT_EQ(r.config.weights, init.weights);
  EXPECT_EQ(r.config.taus, opts.initial_taus);
  EXPECT_EQ(r.state.history.size(), 1u);
}

TEST(Optimize, HistoryMonotoneReproducibleAndBounded) {
  OptimizerOptions opts;
  opts.task.n_stimuli = 80;
  const Budget b{2, 3, 10};
  const auto r = optimize(SignalFamily::SingleGauss, 12, b, 9, opts);
  for (std::size_t i = 1; i < r.state.history.size(); ++i) {
    EXPECT_GE(r.state.history[i].second, r.state.history[i - 1].second);
  }
  EXPECT_EQ(r.state.history.size(), 1 + b.tau_rounds * (b.samples_per_round - 1) + b.weight_steps);
  EXPECT_DOUBLE_EQ(r.state.history.back().second, r.fit.val_score);
  const auto& t = r.config.taus;
  for (double v : {t.mem_s, t.syn_plus_s, t.syn_minus_s}) {
    EXPECT_GE(v, opts.tau_min_s);
    EXPECT_LE(v, opts.tau_max_s);
  }
  const auto again = optimize(SignalFamily::SingleGauss, 12, b, 9, opts);
  EXPECT_EQ(again.config, r.config);
  EXPECT_EQ(again.state.history, r.state.history);
}

TEST(Optimize, SilentInitialNetworkThrows) {
  OptimizerOptions opts;
  opts.task.n_stimuli = 40;
  opts.q = 1e-6;
  EXPECT_THROW(optimize(SignalFamily::DoubleGauss, 8, {1, 2, 2}, 1, opts), std::runtime_error);
}

TEST(TauRatio, SharedConstants) {
  auto cfg = init_config(4, {0.02, 0.02, 0.02}, 1);
  auto r = tau_ratio_report(cfg);
  EXPECT_DOUBLE_EQ(r.plus_over_mem, 1.0);
  EXPECT_DOUBLE_EQ(r.plus_over_minus, 1.0);
  cfg.taus = {0.01, 0.02, 0.01};
  r = tau_ratio_report(cfg);
  EXPECT_DOUBLE_EQ(r.plus_over_mem, 2.0);
  EXPECT_DOUBLE_EQ(r.plus_over_minus, 2.0);
}
