#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "spikecode/network.hpp"

namespace spikecode {

/// First-spike times re-referenced to the median of the fired neurons.
/// Silent neurons carry 0; `fired` disambiguates a neuron sitting exactly on
/// the median from a silent one.
struct Encoding {
  std::vector<double> y_star;
  std::vector<bool> fired;
  std::size_t n_fired = 0;
  double median_s = 0.0;

  std::size_t size() const { return y_star.size(); }
};

/// Median over fired times only (mean of the two middle values for an even
/// count). An all-silent response gives the zero vector.
Encoding encode(const PopulationResponse& response);

/// Adds delta_s to every fired time.
PopulationResponse shift(const PopulationResponse& response, double delta_s);

/// Whether encode(shift(response, delta_s)) matches encode(response). Entries
/// are compared up to the rounding of the two subtractions involved.
bool global_shift_check(const PopulationResponse& response, double delta_s);

/// Always-on trigger over a rolling window of spikes.
///
/// The state keeps the spikes of the trailing window (t > now - window).
/// Once the in-window count has reached the activity floor and then drops,
/// the content of the window just before the drop is encoded (first spike per
/// neuron) and emitted; a one-window hold follows each emission.
class StreamState {
 public:
  StreamState(std::size_t n_neurons, double window_s, double floor_fraction = 0.25);

  /// Feeds spikes with times in (last now, now] and advances the clock to
  /// `now_s`. Throws std::invalid_argument on time regression.
  std::optional<Encoding> step(std::span<const NeuronSpike> new_spikes, double now_s);

  double window_s() const { return window_s_; }
  std::size_t rolling_count() const { return buffer_.size(); }
  std::size_t prev_count() const { return prev_count_; }
  bool triggered() const { return triggered_; }
  /// Clock value of the most recent emission (NaN before the first one).
  double last_emission_s() const { return last_emission_s_; }

 private:
  Encoding encode_window(std::span<const NeuronSpike> spikes) const;

  std::size_t n_neurons_;
  double window_s_;
  std::size_t floor_count_;
  std::deque<NeuronSpike> buffer_;
  std::size_t prev_count_ = 0;
  std::size_t peak_count_ = 0;
  bool triggered_ = false;
  double now_s_;
  double hold_until_s_;
  double last_time_s_;
  double last_emission_s_;
};

std::optional<Encoding> stream_step(StreamState& state, std::span<const NeuronSpike> new_spikes, double now_s);

struct StreamEmission {
  double time_s = 0.0;
  Encoding encoding;
};

/// Runs a sorted spike list through a StreamState, ticking the clock every
/// `tick_s` until `duration_s`.
std::vector<StreamEmission> run_stream(std::span<const NeuronSpike> spikes, std::size_t n_neurons, double window_s,
                                       double duration_s, double tick_s, double floor_fraction = 0.25);

}  // namespace spikecode
