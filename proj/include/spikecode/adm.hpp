#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spikecode/signals.hpp"

namespace spikecode {

/// Two-channel event stream. Times are seconds from the first sample of the
/// converted segment.
struct SpikeStream {
  std::vector<double> up_times;
  std::vector<double> dn_times;
  double delta = 0.0;
  double x0 = 0.0;
  double duration_s = 0.0;

  std::size_t size() const { return up_times.size() + dn_times.size(); }
  bool empty() const { return up_times.empty() && dn_times.empty(); }
};

/// Asynchronous delta modulation. The reference starts at x[0]; a sample
/// reaching ref + delta (ref - delta) emits UP (DN) at that sample time and
/// moves the reference one level. When a sample overshoots by two or more
/// levels only one event is emitted and the reference re-anchors at the
/// sample value. Throws std::invalid_argument on non-finite input or delta <= 0.
SpikeStream adm_encode(std::span<const double> waveform, double fs_hz, double delta);

/// Staircase starting at 0, +delta per UP and -delta per DN, sampled at
/// k / fs for k in [0, n_samples).
Waveform adm_reconstruct(const SpikeStream& stream, std::size_t n_samples, double fs_hz);

struct DeltaSearchOptions {
  std::size_t max_pairs = 2000;
  std::uint64_t seed = 0;
};

/// Picks the candidate maximizing the Pearson correlation between pairwise
/// Euclidean distances of the originals and of their reconstructions.
/// Candidates with zero-variance reconstruction distances are skipped; ties
/// resolve to the smaller delta. Throws when every candidate is degenerate.
double optimize_delta(std::span<const Waveform> dataset, std::span<const double> candidates, double fs_hz,
                      const DeltaSearchOptions& options = {});

/// Distance-structure score of one delta (NaN when degenerate).
double delta_score(std::span<const Waveform> dataset, double delta, double fs_hz,
                   const DeltaSearchOptions& options = {});

/// 20 geometrically spaced values over [0.01, 1] x median peak amplitude.
std::vector<double> default_delta_candidates(std::span<const Waveform> dataset, std::size_t count = 20);

}  // namespace spikecode
