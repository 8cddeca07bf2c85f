#include "spikecode/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "spikecode/metrics.hpp"
#include "spikecode/random.hpp"

namespace spikecode {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SequenceStats sequence_stats(std::span<const Encoding> encodings, const std::vector<double>& ref) {
  SequenceStats st;
  std::vector<std::size_t> included;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (std::isfinite(ref[i])) included.push_back(i);
  }
  st.order = included;
  std::stable_sort(st.order.begin(), st.order.end(), [&](std::size_t a, std::size_t b) { return ref[a] < ref[b]; });
  for (std::size_t i : st.order) st.mean_times.push_back(ref[i]);

  std::vector<double> a;
  std::vector<double> b;
  for (const auto& e : encodings) {
    a.clear();
    b.clear();
    for (std::size_t i : included) {
      if (e.fired[i]) {
        a.push_back(ref[i]);
        b.push_back(e.y_star[i]);
      }
    }
    if (a.size() < 2) continue;
    st.per_trial_taus.push_back(kendall_tau(a, b));
  }
  st.degenerate = st.per_trial_taus.empty();
  st.mi = st.degenerate ? 0.0 : mean(st.per_trial_taus);
  return st;
}

}  // namespace

SequenceStats mutation_index(std::span<const Encoding> encodings) {
  if (encodings.size() < 2) throw std::invalid_argument("mutation index needs at least two trials");
  const std::size_t n = encodings.front().size();
  std::vector<double> sum(n, 0.0);
  std::vector<std::size_t> count(n, 0);
  for (const auto& e : encodings) {
    if (e.size() != n) throw std::invalid_argument("encodings differ in length");
    for (std::size_t i = 0; i < n; ++i) {
      if (e.fired[i]) {
        sum[i] += e.y_star[i];
        ++count[i];
      }
    }
  }
  std::vector<double> ref(n, kNaN);
  for (std::size_t i = 0; i < n; ++i) {
    // Silent in more than half of the trials -> excluded.
    if (count[i] > 0 && 2 * (encodings.size() - count[i]) <= encodings.size()) {
      ref[i] = sum[i] / static_cast<double>(count[i]);
    }
  }
  return sequence_stats(encodings, ref);
}

SequenceStats mutation_index(std::span<const Encoding> encodings, std::span<const double> reference_times) {
  for (const auto& e : encodings) {
    if (e.size() != reference_times.size()) throw std::invalid_argument("reference length mismatch");
  }
  return sequence_stats(encodings, std::vector<double>(reference_times.begin(), reference_times.end()));
}

std::vector<double> rank_spread(std::span<const SequenceStats> sequences) {
  if (sequences.empty()) return {};
  std::size_t len = sequences.front().mean_times.size();
  for (const auto& s : sequences) len = std::min(len, s.mean_times.size());
  std::vector<double> out(len, 0.0);
  if (sequences.size() < 2) return out;
  std::vector<double> col(sequences.size());
  for (std::size_t r = 0; r < len; ++r) {
    for (std::size_t k = 0; k < sequences.size(); ++k) col[k] = sequences[k].mean_times[r];
    out[r] = stddev(col);
  }
  return out;
}

namespace {

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

SimilarityMatrix cross_size_similarity(const std::map<std::size_t, std::vector<Encoding>>& runs) {
  if (runs.size() < 2) throw std::invalid_argument("similarity needs at least two network sizes");
  SimilarityMatrix out;
  std::vector<std::vector<double>> per_size;
  std::vector<double> pooled;
  for (const auto& [size, encs] : runs) {
    out.sizes.push_back(size);
    std::vector<double> times;
    for (const auto& e : encs) {
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e.fired[i]) times.push_back(e.y_star[i]);
      }
    }
    pooled.insert(pooled.end(), times.begin(), times.end());
    per_size.push_back(std::move(times));
  }
  const std::size_t s = per_size.size();
  out.values = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s), kNaN);
  out.excluded.assign(s, true);
  if (pooled.empty()) return out;
  out.lo = percentile(pooled, 0.01);
  out.hi = percentile(pooled, 0.99);
  const double width = out.hi > out.lo ? (out.hi - out.lo) / kHistogramBins : 1.0;

  std::vector<Eigen::VectorXd> hists;
  for (std::size_t k = 0; k < s; ++k) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(kHistogramBins);
    for (double t : per_size[k]) {
      if (t < out.lo || t > out.hi) continue;
      auto bin = static_cast<Eigen::Index>(std::floor((t - out.lo) / width));
      bin = std::clamp<Eigen::Index>(bin, 0, kHistogramBins - 1);
      h(bin) += 1.0;
    }
    const double total = h.sum();
    if (total > 0.0) {
      h /= total;
      h.array() -= h.mean();
      out.excluded[k] = h.norm() == 0.0;
    }
    hists.push_back(std::move(h));
  }
  for (std::size_t a = 0; a < s; ++a) {
    if (out.excluded[a]) continue;
    for (std::size_t b = 0; b < s; ++b) {
      if (out.excluded[b]) continue;
      const auto ia = static_cast<Eigen::Index>(a);
      const auto ib = static_cast<Eigen::Index>(b);
      out.values(ia, ib) = a == b ? 1.0 : hists[a].dot(hists[b]) / (hists[a].norm() * hists[b].norm());
    }
  }
  return out;
}

double mean_off_diagonal(const SimilarityMatrix& m) {
  double sum = 0.0;
  std::size_t count = 0;
  for (Eigen::Index a = 0; a < m.values.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < m.values.cols(); ++b) {
      if (std::isfinite(m.values(a, b))) {
        sum += m.values(a, b);
        ++count;
      }
    }
  }
  return count > 0 ? sum / static_cast<double>(count) : kNaN;
}

namespace {

struct SplitResponses {
  std::vector<PopulationResponse> train;
  std::vector<PopulationResponse> val;
  std::vector<PopulationResponse> test;
};

SplitResponses simulate_task(const NetworkConfig& config, const TaskData& task) {
  const auto sim = simulation_options(task.grid);
  return {simulate_set(config, task.train, sim), simulate_set(config, task.val, sim),
          simulate_set(config, task.test, sim)};
}

template <typename Perturb>
std::vector<PopulationResponse> perturb_all(const std::vector<PopulationResponse>& in, Perturb&& f) {
  std::vector<PopulationResponse> out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out.push_back(f(in[i], i));
  return out;
}

double test_kendall(const TaskData& task, const std::vector<PopulationResponse>& train,
                    const std::vector<PopulationResponse>& val, const std::vector<PopulationResponse>& test) {
  const auto tr = make_samples(train, task.train.params);
  const auto va = make_samples(val, task.val.params);
  const auto te = make_samples(test, task.test.params);
  FitOptions fo;
  fo.train_curve = false;
  const auto f = fit(tr, va, fo);
  return evaluate(f.decoder, te).kendall_mean;
}

double test_kendall_with(const TaskData& task, const TrainedDecoder& decoder,
                         const std::vector<PopulationResponse>& test) {
  return evaluate(decoder, make_samples(test, task.test.params)).kendall_mean;
}

}  // namespace

std::vector<RobustnessCell> robustness_sweep(const NetworkConfig& config, const TaskData& task,
                                             const RobustnessGrid& grid) {
  const auto base = simulate_task(config, task);
  FitOptions fo;
  fo.train_curve = false;
  const auto base_fit = fit(make_samples(base.train, task.train.params), make_samples(base.val, task.val.params), fo);
  const double baseline = test_kendall_with(task, base_fit.decoder, base.test);
  const std::size_t repeats = std::max<std::size_t>(grid.repeats, 1);

  std::vector<RobustnessCell> cells;
  auto push = [&](std::string arm, double tr, double te, double kendall) {
    const double pct = baseline > 0.0 ? 100.0 * kendall / baseline : 0.0;
    cells.push_back({std::move(arm), tr, te, kendall, pct});
  };

  // Draw seeds per (arm, cell, repeat, split, stimulus) so cells stay independent.
  auto cell_seed = [&](std::uint64_t arm, std::size_t a, std::size_t b, std::size_t r) {
    return derive_seed(derive_seed(derive_seed(grid.seed, arm), a * 1000 + b), r);
  };

  auto sweep_spikes = [&](const std::string& arm, std::uint64_t arm_id, const std::vector<double>& train_levels,
                          const std::vector<double>& test_levels, auto&& perturb) {
    for (std::size_t a = 0; a < train_levels.size(); ++a) {
      for (std::size_t b = 0; b < test_levels.size(); ++b) {
        const double tr = train_levels[a];
        const double te = test_levels[b];
        if (tr == 0.0 && te == 0.0) {
          push(arm, tr, te, baseline);
          continue;
        }
        double acc = 0.0;
        for (std::size_t r = 0; r < repeats; ++r) {
          const auto s = cell_seed(arm_id, a, b, r);
          const auto test = perturb_all(base.test, [&](const PopulationResponse& x, std::size_t i) {
            return perturb(x, te, derive_seed(s, 3'000'000 + i));
          });
          if (tr == 0.0) {
            acc += test_kendall_with(task, base_fit.decoder, test);
          } else {
            const auto train = perturb_all(base.train, [&](const PopulationResponse& x, std::size_t i) {
              return perturb(x, tr, derive_seed(s, 1'000'000 + i));
            });
            const auto val = perturb_all(base.val, [&](const PopulationResponse& x, std::size_t i) {
              return perturb(x, tr, derive_seed(s, 2'000'000 + i));
            });
            acc += test_kendall(task, train, val, test);
          }
        }
        push(arm, tr, te, acc / static_cast<double>(repeats));
      }
    }
  };

  sweep_spikes("jitter", 1, grid.jitter_train_s, grid.jitter_test_s,
               [](const PopulationResponse& x, double level, std::uint64_t s) { return apply_jitter(x, level, s); });
  sweep_spikes("delete", 2, grid.delete_train, grid.delete_test,
               [](const PopulationResponse& x, double level, std::uint64_t s) { return delete_spikes(x, level, s); });

  auto sweep_homog = [&](const std::string& arm, std::uint64_t arm_id, const std::vector<double>& levels,
                         bool weights) {
    for (std::size_t a = 0; a < levels.size(); ++a) {
      const double level = levels[a];
      if (level == 0.0) {
        push(arm, level, level, baseline);
        continue;
      }
      double acc = 0.0;
      // Full homogenization does not depend on the draw.
      const std::size_t reps = level >= 100.0 ? 1 : repeats;
      for (std::size_t r = 0; r < reps; ++r) {
        const auto s = cell_seed(arm_id, a, 0, r);
        const auto h = weights ? homogenize(config, level, 0.0, s) : homogenize(config, 0.0, level, s);
        const auto resp = simulate_task(h, task);
        acc += test_kendall(task, resp.train, resp.val, resp.test);
      }
      push(arm, level, level, acc / static_cast<double>(reps));
    }
  };
  sweep_homog("homog_w", 3, grid.homog_w, true);
  sweep_homog("homog_tau", 4, grid.homog_tau, false);
  return cells;
}

std::vector<CrossTypeEntry> in_out_type_eval(const NetworkConfig& config, double delta, SignalFamily trained_family,
                                             const CrossTypeOptions& options) {
  std::vector<CrossTypeEntry> out;
  for (auto family : kAllFamilies) {
    TaskOptions to;
    to.preset = options.preset;
    to.n_stimuli = options.n_stimuli;
    to.delta = delta;
    const auto task = build_task(family, to, derive_seed(options.seed, static_cast<std::uint64_t>(family)));
    const auto resp = simulate_task(config, task);
    const auto tr = make_samples(resp.train, task.train.params);
    const auto va = make_samples(resp.val, task.val.params);
    const auto te = make_samples(resp.test, task.test.params);
    FitOptions fo;
    fo.train_curve = false;
    const auto f = fit(tr, va, fo);
    const auto rep = evaluate(f.decoder, te);
    CrossTypeEntry e;
    e.family = family;
    e.pearson = rep.pearson_mean;
    e.kendall = rep.kendall_mean;
    e.in_type = family == trained_family;
    e.degenerate = rep.degenerate || f.decoder.k == 0;
    out.push_back(e);
  }
  return out;
}

}  // namespace spikecode
