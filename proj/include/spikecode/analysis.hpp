#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "spikecode/decoder.hpp"
#include "spikecode/encoder.hpp"
#include "spikecode/network.hpp"
#include "spikecode/task.hpp"

namespace spikecode {

struct SequenceStats {
  /// Included neurons sorted by mean relative spike time.
  std::vector<std::size_t> order;
  /// Mean relative times matching `order`.
  std::vector<double> mean_times;
  double mi = 0.0;
  std::vector<double> per_trial_taus;
  bool degenerate = false;
};

/// Mutation index: mean Kendall-tau between the mean spiking sequence and
/// each trial's sequence over the neurons both share. Neurons silent in more
/// than half of the trials are left out; trials with fewer than two shared
/// neurons are skipped.
SequenceStats mutation_index(std::span<const Encoding> encodings);

/// Same statistic against a given per-neuron reference time vector
/// (non-finite entries mark excluded neurons).
SequenceStats mutation_index(std::span<const Encoding> encodings, std::span<const double> reference_times);

/// Per-rank standard deviation of mean relative times across several mean
/// sequences (e.g. one per family at a fixed size); ranks beyond the shortest
/// sequence are dropped.
std::vector<double> rank_spread(std::span<const SequenceStats> sequences);

struct SimilarityMatrix {
  std::vector<std::size_t> sizes;
  Eigen::MatrixXd values;     // NaN rows/cols for excluded sizes
  std::vector<bool> excluded; // empty histogram
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr std::size_t kHistogramBins = 40;

/// Histogram of all relative spike times per network size on shared bins
/// (40 bins over the pooled 1st-99th percentile range), normalized to unit
/// sum with the mean bin removed; returns pairwise cosine similarities.
SimilarityMatrix cross_size_similarity(const std::map<std::size_t, std::vector<Encoding>>& runs);

/// Mean of the off-diagonal entries over non-excluded sizes.
double mean_off_diagonal(const SimilarityMatrix& m);

struct RobustnessGrid {
  std::vector<double> jitter_train_s{0.0, 2e-4, 4e-4, 8e-4, 1e-3};
  std::vector<double> jitter_test_s{0.0, 2e-4, 4e-4, 8e-4, 1e-3};
  std::vector<double> delete_train{0.0, 0.05, 0.1, 0.2, 0.4};
  std::vector<double> delete_test{0.0, 0.05, 0.1, 0.2, 0.4};
  std::vector<double> homog_w{0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::vector<double> homog_tau{0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  /// Independent perturbation draws averaged per cell.
  std::size_t repeats = 3;
  std::uint64_t seed = 0;
};

struct RobustnessCell {
  std::string arm;  // jitter, delete, homog_w, homog_tau
  double train_level = 0.0;
  double test_level = 0.0;
  double kendall = 0.0;
  /// Kendall-tau as a percentage of the unperturbed test score.
  double score_pct = 0.0;
};

/// Perturbs train and/or test responses (jitter, deletion) or the network
/// (homogenization), refits the readout whenever the training side changed
/// and scores on the test split.
std::vector<RobustnessCell> robustness_sweep(const NetworkConfig& config, const TaskData& task,
                                             const RobustnessGrid& grid);

struct CrossTypeEntry {
  SignalFamily family = SignalFamily::Sinusoidal;
  double pearson = 0.0;
  double kendall = 0.0;
  bool in_type = false;
  bool degenerate = false;
};

struct CrossTypeOptions {
  std::size_t n_stimuli = 300;
  std::uint64_t seed = 0;
  Preset preset = Preset::Sim;
};

/// Encodes fresh stimuli of every family with the frozen network (same ADM
/// threshold), fits a new readout per family and reports test correlations.
std::vector<CrossTypeEntry> in_out_type_eval(const NetworkConfig& config, double delta, SignalFamily trained_family,
                                             const CrossTypeOptions& options = {});

}  // namespace spikecode
