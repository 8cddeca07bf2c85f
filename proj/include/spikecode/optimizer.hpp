#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "spikecode/decoder.hpp"
#include "spikecode/network.hpp"
#include "spikecode/task.hpp"

namespace spikecode {

struct Budget {
  std::size_t tau_rounds = 10;
  std::size_t samples_per_round = 8;
  std::size_t weight_steps = 300;
};

struct OptimizerOptions {
  TimeConstants initial_taus{0.02, 0.02, 0.02};
  double initial_radius = 0.5;
  double radius_decay = 0.8;
  double tau_min_s = 1e-4;
  double tau_max_s = 0.5;
  double sigma_het = 0.2;
  double q = 30.0;
  double theta = 1.0;
  /// Alternate one tau round with a share of the weight steps instead of
  /// running all tau rounds first.
  bool interleaved = false;
  TaskOptions task;
};

struct OptState {
  TimeConstants center_taus;
  double radius = 0.0;
  NetworkConfig best_config;
  double best_score = 0.0;
  std::size_t iteration = 0;
  std::uint64_t rng_seed = 0;
  /// (evaluation index, best validation score so far).
  std::vector<std::pair<std::size_t, double>> history;
  std::size_t accepted_weight_steps = 0;
};

struct OptimizationResult {
  NetworkConfig config;
  FitResult fit;
  Report test_report;
  OptState state;
  TaskData task;
};

/// m triplets uniform in the ball of radius `radius` around log(center),
/// clipped to [tau_min, tau_max].
std::vector<TimeConstants> sample_tau_candidates(const TimeConstants& center, double radius, std::size_t m,
                                                 std::uint64_t seed, double tau_min_s = 1e-4, double tau_max_s = 0.5);

/// Picks one neuron and perturbs its excitatory pair, inhibitory pair or
/// both by steps in {-4..-1, 1..4}; within a pair either both weights or a
/// single one move. Results are clamped to [0, w_max].
NetworkConfig mutate_weights(const NetworkConfig& config, std::uint64_t seed);

/// Index of the neuron mutate_weights(config, seed) touches.
std::size_t mutated_neuron(const NetworkConfig& config, std::uint64_t seed);

/// Validation score of a config on a task (decoder selection included).
double score_config(const NetworkConfig& config, const TaskData& task);

/// Evolutionary search: tau rounds move the sampling centre to the best
/// candidate (the incumbent centre is candidate 0) and shrink the radius;
/// weight steps keep a mutation only when the validation score strictly
/// improves. Throws std::runtime_error when the initial network is silent on
/// more than half of the training stimuli.
OptimizationResult optimize(SignalFamily family, std::size_t n, const Budget& budget, std::uint64_t seed,
                            const OptimizerOptions& options = {});

/// The task optimize(family, ..., seed, options) trains on.
TaskData optimization_task(SignalFamily family, std::uint64_t seed, const OptimizerOptions& options = {});

/// Same search on a prebuilt task.
OptimizationResult optimize_task(TaskData task, std::size_t n, const Budget& budget, std::uint64_t seed,
                                 const OptimizerOptions& options = {});

struct TauRatios {
  double plus_over_mem = 0.0;
  double plus_over_minus = 0.0;
};

TauRatios tau_ratio_report(const NetworkConfig& config);

}  // namespace spikecode
