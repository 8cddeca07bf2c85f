#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "spikecode/analysis.hpp"
#include "spikecode/metrics.hpp"

using namespace spikecode;

namespace {

Encoding make_enc(const std::vector<double>& times) {
  return encode(PopulationResponse::from_times(times));
}

// Per trial, Kendall of reference vs trial over neurons kept and fired in the trial.
double brute_mi(const std::vector<Encoding>& encs) {
  const std::size_t n = encs[0].size();
  const std::size_t t_count = encs.size();
  std::vector<double> ref(n, 0.0);
  std::vector<bool> keep(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = 0;
    double sum = 0.0;
    for (const auto& e : encs) {
      if (e.fired[i]) {
        ++c;
        sum += e.y_star[i];
      }
    }
    keep[i] = c > 0 && 2 * (t_count - c) <= t_count;
    if (c > 0) ref[i] = sum / static_cast<double>(c);
  }
  double total = 0.0;
  std::size_t valid = 0;
  for (const auto& e : encs) {
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t i = 0; i < n; ++i) {
      if (keep[i] && e.fired[i]) {
        a.push_back(ref[i]);
        b.push_back(e.y_star[i]);
      }
    }
    if (a.size() < 2) continue;
    long long con = 0;
    long long dis = 0;
    for (std::size_t p = 0; p < a.size(); ++p) {
      for (std::size_t q = p + 1; q < a.size(); ++q) {
        const double s = (a[p] - a[q]) * (b[p] - b[q]);
        con += s > 0;
        dis += s < 0;
      }
    }
    const double pairs = static_cast<double>(a.size() * (a.size() - 1) / 2);
    total += static_cast<double>(con - dis) / pairs;
    ++valid;
  }
  return valid ? total / static_cast<double>(valid) : 0.0;
}

}  // namespace

TEST(MutationIndex, IdenticalTrialsGiveOne) {
  std::vector<Encoding> encs(10, make_enc({0.001, 0.003, 0.004, 0.008}));
  const auto s = mutation_index(encs);
  EXPECT_DOUBLE_EQ(s.mi, 1.0);
  EXPECT_EQ(s.order, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_FALSE(s.degenerate);
}

TEST(MutationIndex, AgainstReferenceHalfReversedIsZero) {
  std::vector<Encoding> encs;
  for (int t = 0; t < 6; ++t) {
    encs.push_back(t % 2 == 0 ? make_enc({0.001, 0.002, 0.003, 0.004}) : make_enc({0.004, 0.003, 0.002, 0.001}));
  }
  const std::vector<double> ref{1, 2, 3, 4};
  EXPECT_NEAR(mutation_index(encs, ref).mi, 0.0, 1e-15);
}

TEST(MutationIndex, HandTrialsMatchPairCount) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.05);
  std::vector<Encoding> encs;
  for (int t = 0; t < 10; ++t) {
    std::vector<double> times(5);
    for (std::size_t i = 0; i < 5; ++i) times[i] = 0.01 * static_cast<double>(i) + u(rng) * 0.3;
    if (t % 3 == 0) times[4] = kNoSpike;
    if (t < 6) times[0] = kNoSpike;  // neuron 0 silent in 6/10 trials: excluded
    encs.push_back(make_enc(times));
  }
  const auto s = mutation_index(encs);
  EXPECT_NEAR(s.mi, brute_mi(encs), 1e-12);
  EXPECT_EQ(std::count(s.order.begin(), s.order.end(), 0u), 0);
  EXPECT_EQ(s.order.size(), 4u);
}

TEST(MutationIndex, ShuffledTrialsNearZero) {
  std::mt19937_64 rng(11);
  const std::size_t n = 12;
  const std::size_t trials = 200;
  std::vector<Encoding> encs;
  std::vector<double> base(n);
  for (std::size_t i = 0; i < n; ++i) base[i] = 0.001 * static_cast<double>(i + 1);
  for (std::size_t t = 0; t < trials; ++t) {
    auto perm = base;
    std::shuffle(perm.begin(), perm.end(), rng);
    encs.push_back(make_enc(perm));
  }
  const double pairs = static_cast<double>(n * (n - 1) / 2);
  // Each trial's tau has SD of order 1/sqrt(pairs), the mean over trials 1/sqrt(T pairs).
  EXPECT_LT(std::abs(mutation_index(encs).mi), 3.0 / std::sqrt(static_cast<double>(trials) * pairs) * 2.0);
}

TEST(MutationIndex, DegenerateAndErrors) {
  std::vector<Encoding> silent(4, encode(PopulationResponse::silent(5)));
  EXPECT_TRUE(mutation_index(silent).degenerate);
  std::vector<Encoding> one(1, make_enc({0.001, 0.002}));
  EXPECT_THROW(mutation_index(one), std::invalid_argument);
}

TEST(Similarity, IdenticalRunsGiveOne) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 0.004);
  std::vector<Encoding> run;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> times(20);
    for (auto& x : times) x = 0.05 + g(rng);
    run.push_back(make_enc(times));
  }
  std::map<std::size_t, std::vector<Encoding>> runs{{16, run}, {64, run}};
  const auto m = cross_size_similarity(runs);
  EXPECT_NEAR(m.values(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(m.values(1, 0), m.values(0, 1), 1e-15);
  EXPECT_DOUBLE_EQ(m.values(0, 0), 1.0);
  EXPECT_NEAR(mean_off_diagonal(m), 1.0, 1e-12);
}

TEST(Similarity, OpposedShapesAreNegative) {
  // Two clusters at +-10 ms around the median vs one cluster on it.
  std::vector<Encoding> split;
  std::vector<Encoding> central;
  for (int t = 0; t < 40; ++t) {
    std::vector<double> a;
    std::vector<double> b;
    for (int i = 0; i < 10; ++i) {
      const double j = 1e-4 * ((t * 7 + i * 3) % 10);
      a.push_back((i < 5 ? 0.0 : 0.02) + j);
      b.push_back(0.01 + j);
    }
    split.push_back(make_enc(a));
    central.push_back(make_enc(b));
  }
  const auto m = cross_size_similarity({{16, split}, {64, central}});
  EXPECT_LT(m.values(0, 1), 0.0);
  EXPECT_GE(m.values(0, 1), -1.0 - 1e-12);
}

TEST(Similarity, SilentRunExcluded) {
  std::vector<Encoding> live;
  for (int t = 0; t < 10; ++t) live.push_back(make_enc({0.001, 0.002 + 0.0001 * t, 0.004}));
  std::vector<Encoding> dead(10, encode(PopulationResponse::silent(3)));
  const auto m = cross_size_similarity({{16, live}, {32, live}, {64, dead}});
  EXPECT_FALSE(m.excluded[0]);
  EXPECT_TRUE(m.excluded[2]);
  EXPECT_TRUE(std::isnan(m.values(2, 0)));
  EXPECT_NEAR(mean_off_diagonal(m), 1.0, 1e-12);
  EXPECT_THROW(cross_size_similarity({{16, live}}), std::invalid_argument);
}

TEST(RankSpread, MatchesPerRankSd) {
  SequenceStats a;
  a.mean_times = {-0.002, 0.0, 0.003};
  SequenceStats b;
  b.mean_times = {-0.004, 0.002};
  const std::vector<SequenceStats> seqs{a, b};
  const auto sd = rank_spread(seqs);
  ASSERT_EQ(sd.size(), 2u);
  const std::vector<double> r0{-0.002, -0.004};
  const std::vector<double> r1{0.0, 0.002};
  EXPECT_NEAR(sd[0], stddev(r0), 1e-15);
  EXPECT_NEAR(sd[1], stddev(r1), 1e-15);
}

namespace {

TaskData small_task(SignalFamily f, std::uint64_t seed) {
  TaskOptions o;
  o.n_stimuli = 60;
  return build_task(f, o, seed);
}

}  // namespace

TEST(Robustness, ZeroCellsAreBaseline) {
  const auto task = small_task(SignalFamily::DoubleGauss, 2);
  auto cfg = init_config(16, {}, 5);
  RobustnessGrid grid;
  grid.jitter_train_s = {0.0, 4e-4};
  grid.jitter_test_s = {0.0, 4e-4};
  grid.delete_train = {0.0};
  grid.delete_test = {0.0, 0.2};
  grid.homog_w = {0, 100};
  grid.homog_tau = {0};
  grid.repeats = 2;
  const auto cells = robustness_sweep(cfg, task, grid);
  std::size_t zeros = 0;
  for (const auto& c : cells) {
    if (c.train_level == 0.0 && c.test_level == 0.0) {
      ++zeros;
      EXPECT_DOUBLE_EQ(c.score_pct, 100.0) << c.arm;
    }
  }
  EXPECT_EQ(zeros, 4u);
  EXPECT_EQ(cells.size(), 4u + 2u + 2u + 1u);
  EXPECT_EQ(robustness_sweep(cfg, task, grid).back().kendall, cells.back().kendall);
}

TEST(CrossType, SilentNetworkFlagged) {
  auto cfg = init_config(8, {}, 1);
  for (auto& row : cfg.weights) row = {0, 0, 0, 0};
  CrossTypeOptions o;
  o.n_stimuli = 30;
  const auto entries = in_out_type_eval(cfg, 0.1, SignalFamily::Gabor, o);
  ASSERT_EQ(entries.size(), 4u);
  std::size_t in_type = 0;
  for (const auto& e : entries) {
    EXPECT_TRUE(e.degenerate);
    in_type += e.in_type;
  }
  EXPECT_EQ(in_type, 1u);
}
