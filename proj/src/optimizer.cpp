#include "spikecode/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spikecode/random.hpp"

namespace spikecode {

std::vector<TimeConstants> sample_tau_candidates(const TimeConstants& center, double radius, std::size_t m,
                                                 std::uint64_t seed, double tau_min_s, double tau_max_s) {
  if (!(center.mem_s > 0.0 && center.syn_plus_s > 0.0 && center.syn_minus_s > 0.0)) {
    throw std::invalid_argument("tau centre must be positive");
  }
  if (!(radius >= 0.0 && radius < 1.0)) throw std::invalid_argument("radius must lie in [0, 1)");
  auto rng = make_rng(seed, 0x7a0c);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<TimeConstants> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::array<double, 3> dir{};
    double norm = 0.0;
    while (norm < 1e-12) {
      for (double& d : dir) d = gauss(rng);
      norm = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
    }
    const double r = radius * std::cbrt(unit(rng));
    auto place = [&](double c, double d) {
      const double offset = r * d / norm;
      return std::clamp(offset == 0.0 ? c : c * std::exp(offset), tau_min_s, tau_max_s);
    };
    out.push_back({place(center.mem_s, dir[0]), place(center.syn_plus_s, dir[1]), place(center.syn_minus_s, dir[2])});
  }
  return out;
}

std::size_t mutated_neuron(const NetworkConfig& config, std::uint64_t seed) {
  auto rng = make_rng(seed, 0x3a7);
  std::uniform_int_distribution<std::size_t> pick(0, config.size() - 1);
  return pick(rng);
}

NetworkConfig mutate_weights(const NetworkConfig& config, std::uint64_t seed) {
  if (config.size() == 0) throw std::invalid_argument("cannot mutate an empty network");
  NetworkConfig out = config;
  auto rng = make_rng(seed, 0x3a7);
  std::uniform_int_distribution<std::size_t> pick(0, config.size() - 1);
  const std::size_t i = pick(rng);
  std::uniform_int_distribution<int> polarity(0, 2);  // 0 exc, 1 inh, 2 both
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> magnitude(1, 4);
  const int which = polarity(rng);
  auto& row = out.weights[i];
  auto perturb = [&](std::size_t slot) {
    const int step = magnitude(rng) * (coin(rng) == 0 ? -1 : 1);
    row[slot] = std::clamp(row[slot] + step, 0, config.w_max);
  };
  auto mutate_pair = [&](std::size_t up_slot, std::size_t dn_slot) {
    if (coin(rng) == 0) {
      perturb(up_slot);
      perturb(dn_slot);
    } else {
      perturb(coin(rng) == 0 ? up_slot : dn_slot);
    }
  };
  if (which == 0 || which == 2) mutate_pair(kPlusUp, kPlusDn);
  if (which == 1 || which == 2) mutate_pair(kMinusUp, kMinusDn);
  return out;
}

namespace {

// Train/val responses of the current incumbent, so a weight mutation only
// re-simulates the one neuron it touched.
class ResponseCache {
 public:
  ResponseCache(const TaskData& task, const SimulationOptions& sim) : task_(task), sim_(sim) {}

  double evaluate_full(const NetworkConfig& cfg) {
    train_ = simulate_set(cfg, task_.train, sim_);
    val_ = simulate_set(cfg, task_.val, sim_);
    return score();
  }

  // Re-simulates neuron i under cfg; returns the score. Resulting responses
  // stay in place until revert() restores the saved entries.
  double evaluate_neuron(const NetworkConfig& cfg, std::size_t i) {
    saved_neuron_ = i;
    saved_train_.clear();
    saved_val_.clear();
    const std::size_t idx[] = {i};
    for (std::size_t s = 0; s < train_.size(); ++s) {
      saved_train_.push_back(train_[s].first_spike_s[i]);
      simulate_neurons(cfg, task_.train.streams[s], sim_, idx, train_[s]);
    }
    for (std::size_t s = 0; s < val_.size(); ++s) {
      saved_val_.push_back(val_[s].first_spike_s[i]);
      simulate_neurons(cfg, task_.val.streams[s], sim_, idx, val_[s]);
    }
    return score();
  }

  void revert() {
    const std::size_t i = saved_neuron_;
    for (std::size_t s = 0; s < train_.size(); ++s) {
      train_[s].first_spike_s[i] = saved_train_[s];
      train_[s].fired[i] = std::isfinite(saved_train_[s]);
    }
    for (std::size_t s = 0; s < val_.size(); ++s) {
      val_[s].first_spike_s[i] = saved_val_[s];
      val_[s].fired[i] = std::isfinite(saved_val_[s]);
    }
  }

  std::vector<PopulationResponse> train_responses() const { return train_; }

  double score() const {
    const auto tr = make_samples(train_, task_.train.params);
    const auto va = make_samples(val_, task_.val.params);
    FitOptions fo;
    fo.train_curve = false;
    return fit(tr, va, fo).val_score;
  }

 private:
  const TaskData& task_;
  SimulationOptions sim_;
  std::vector<PopulationResponse> train_;
  std::vector<PopulationResponse> val_;
  std::size_t saved_neuron_ = 0;
  std::vector<double> saved_train_;
  std::vector<double> saved_val_;
};

void check_activity(const std::vector<PopulationResponse>& train, const NetworkConfig& cfg) {
  const auto silent = static_cast<std::size_t>(
      std::count_if(train.begin(), train.end(), [](const PopulationResponse& r) { return r.n_fired() == 0; }));
  if (2 * silent > train.size()) {
    std::ostringstream msg;
    msg << "initial network is silent on " << silent << " of " << train.size()
        << " training stimuli; raise q (currently " << cfg.q << ") or lower theta (currently " << cfg.theta << ")";
    throw std::runtime_error(msg.str());
  }
}

}  // namespace

double score_config(const NetworkConfig& config, const TaskData& task) {
  ResponseCache cache(task, simulation_options(task.grid));
  return cache.evaluate_full(config);
}

OptimizationResult optimize_task(TaskData task, std::size_t n, const Budget& budget, std::uint64_t seed,
                                 const OptimizerOptions& options) {
  if (budget.tau_rounds == 0 || budget.samples_per_round == 0) {
    throw std::invalid_argument("budget needs at least one tau round with one sample");
  }
  const auto sim = simulation_options(task.grid);
  OptimizationResult result;
  OptState& st = result.state;
  st.rng_seed = seed;
  st.center_taus = options.initial_taus;
  st.radius = options.initial_radius;

  NetworkConfig cfg = init_config(n, options.initial_taus, derive_seed(seed, 0x11e7), options.sigma_het);
  cfg.q = options.q;
  cfg.theta = options.theta;

  ResponseCache cache(task, sim);
  st.best_score = cache.evaluate_full(cfg);
  check_activity(cache.train_responses(), cfg);
  st.best_config = cfg;
  st.history.emplace_back(st.iteration++, st.best_score);

  std::size_t round = 0;
  std::size_t weight_step = 0;
  auto tau_round = [&] {
    const auto cands = sample_tau_candidates(st.center_taus, st.radius, budget.samples_per_round - 1,
                                             derive_seed(seed, 0x1000 + round), options.tau_min_s, options.tau_max_s);
    NetworkConfig best = st.best_config;
    double best_score = st.best_score;
    bool moved = false;
    for (const auto& taus : cands) {
      NetworkConfig trial = st.best_config;
      trial.taus = taus;
      const double s = score_config(trial, task);
      if (s > best_score) {
        best_score = s;
        best = trial;
        moved = true;
      }
      st.history.emplace_back(st.iteration++, std::max(st.best_score, best_score));
    }
    if (moved) {
      st.best_config = best;
      st.best_score = best_score;
      cache.evaluate_full(st.best_config);
    }
    st.center_taus = st.best_config.taus;
    st.radius *= options.radius_decay;
    ++round;
  };
  auto weight_steps = [&](std::size_t count) {
    for (std::size_t s = 0; s < count; ++s, ++weight_step) {
      const auto step_seed = derive_seed(seed, 0x200000 + weight_step);
      NetworkConfig trial = mutate_weights(st.best_config, step_seed);
      const std::size_t i = mutated_neuron(st.best_config, step_seed);
      if (trial.weights[i] != st.best_config.weights[i]) {
        const double score = cache.evaluate_neuron(trial, i);
        if (score > st.best_score) {
          st.best_score = score;
          st.best_config = std::move(trial);
          ++st.accepted_weight_steps;
        } else {
          cache.revert();
        }
      }
      st.history.emplace_back(st.iteration++, st.best_score);
    }
  };

  if (options.interleaved) {
    const std::size_t per_round = budget.weight_steps / budget.tau_rounds;
    for (std::size_t r = 0; r < budget.tau_rounds; ++r) {
      tau_round();
      const std::size_t extra = r + 1 == budget.tau_rounds ? budget.weight_steps - per_round * budget.tau_rounds : 0;
      weight_steps(per_round + extra);
    }
  } else {
    for (std::size_t r = 0; r < budget.tau_rounds; ++r) tau_round();
    weight_steps(budget.weight_steps);
  }

  result.config = st.best_config;
  const auto train = make_samples(simulate_set(result.config, task.train, sim), task.train.params);
  const auto val = make_samples(simulate_set(result.config, task.val, sim), task.val.params);
  result.fit = fit(train, val);
  const auto test = make_samples(simulate_set(result.config, task.test, sim), task.test.params);
  result.test_report = evaluate(result.fit.decoder, test);
  result.task = std::move(task);
  return result;
}

OptimizationResult optimize(SignalFamily family, std::size_t n, const Budget& budget, std::uint64_t seed,
                            const OptimizerOptions& options) {
  return optimize_task(optimization_task(family, seed, options), n, budget, seed, options);
}

TaskData optimization_task(SignalFamily family, std::uint64_t seed, const OptimizerOptions& options) {
  return build_task(family, options.task, derive_seed(seed, 0x7a5c));
}

TauRatios tau_ratio_report(const NetworkConfig& config) {
  return {config.taus.syn_plus_s / config.taus.mem_s, config.taus.syn_plus_s / config.taus.syn_minus_s};
}

}  // namespace spikecode
