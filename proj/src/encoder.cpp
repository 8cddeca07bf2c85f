#include "spikecode/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spikecode {

Encoding encode(const PopulationResponse& response) {
  const std::size_t n = response.size();
  Encoding enc;
  enc.y_star.assign(n, 0.0);
  enc.fired = response.fired;
  std::vector<double> times;
  times.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (response.fired[i]) times.push_back(response.first_spike_s[i]);
  }
  enc.n_fired = times.size();
  if (times.empty()) return enc;
  std::sort(times.begin(), times.end());
  const std::size_t m = times.size();
  enc.median_s = m % 2 == 1 ? times[m / 2] : 0.5 * (times[m / 2 - 1] + times[m / 2]);
  for (std::size_t i = 0; i < n; ++i) {
    if (response.fired[i]) enc.y_star[i] = response.first_spike_s[i] - enc.median_s;
  }
  return enc;
}

PopulationResponse shift(const PopulationResponse& response, double delta_s) {
  PopulationResponse out = response;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.fired[i]) out.first_spike_s[i] += delta_s;
  }
  return out;
}

bool global_shift_check(const PopulationResponse& response, double delta_s) {
  const auto a = encode(response);
  const auto b = encode(shift(response, delta_s));
  if (a.fired != b.fired) return false;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a.fired[i]) continue;
    const double scale = std::abs(response.first_spike_s[i]) + std::abs(a.median_s) + std::abs(delta_s);
    if (std::abs(a.y_star[i] - b.y_star[i]) > 8.0 * eps * scale) return false;
  }
  return true;
}

StreamState::StreamState(std::size_t n_neurons, double window_s, double floor_fraction)
    : n_neurons_(n_neurons),
      window_s_(window_s),
      floor_count_(static_cast<std::size_t>(std::ceil(floor_fraction * static_cast<double>(n_neurons) - 1e-9))),
      now_s_(-std::numeric_limits<double>::infinity()),
      hold_until_s_(-std::numeric_limits<double>::infinity()),
      last_time_s_(-std::numeric_limits<double>::infinity()),
      last_emission_s_(std::numeric_limits<double>::quiet_NaN()) {
  if (n_neurons == 0) throw std::invalid_argument("stream state needs neurons");
  if (!(window_s > 0.0)) throw std::invalid_argument("window must be positive");
  floor_count_ = std::max<std::size_t>(floor_count_, 1);
}

Encoding StreamState::encode_window(std::span<const NeuronSpike> spikes) const {
  std::vector<double> times(n_neurons_, kNoSpike);
  for (const auto& s : spikes) {
    if (s.neuron >= n_neurons_) continue;
    times[s.neuron] = std::min(times[s.neuron], s.time_s);
  }
  return encode(PopulationResponse::from_times(times));
}

std::optional<Encoding> StreamState::step(std::span<const NeuronSpike> new_spikes, double now_s) {
  if (now_s < now_s_) throw std::invalid_argument("stream clock moved backwards");
  for (const auto& s : new_spikes) {
    if (s.time_s < last_time_s_) throw std::invalid_argument("spike times must be non-decreasing");
    if (s.time_s > now_s) throw std::invalid_argument("spike later than the stream clock");
    last_time_s_ = s.time_s;
  }
  now_s_ = now_s;
  triggered_ = false;

  // Window content before anything leaves it this tick.
  std::vector<NeuronSpike> before(buffer_.begin(), buffer_.end());
  std::size_t evicted = 0;
  while (!buffer_.empty() && buffer_.front().time_s <= now_s - window_s_) {
    buffer_.pop_front();
    ++evicted;
  }
  for (const auto& s : new_spikes) {
    if (s.time_s > now_s - window_s_) buffer_.push_back(s);
  }

  const std::size_t count = buffer_.size();
  std::optional<Encoding> out;
  if (count < prev_count_ && evicted > 0 && peak_count_ >= floor_count_ && now_s >= hold_until_s_) {
    out = encode_window(before);
    triggered_ = true;
    hold_until_s_ = now_s + window_s_;
    last_emission_s_ = now_s;
    peak_count_ = 0;
  } else if (now_s >= hold_until_s_) {
    peak_count_ = std::max(peak_count_, count);
  }
  prev_count_ = count;
  return out;
}

std::optional<Encoding> stream_step(StreamState& state, std::span<const NeuronSpike> new_spikes, double now_s) {
  return state.step(new_spikes, now_s);
}

std::vector<StreamEmission> run_stream(std::span<const NeuronSpike> spikes, std::size_t n_neurons, double window_s,
                                       double duration_s, double tick_s, double floor_fraction) {
  if (!(tick_s > 0.0)) throw std::invalid_argument("tick must be positive");
  StreamState state(n_neurons, window_s, floor_fraction);
  std::vector<StreamEmission> out;
  std::size_t next = 0;
  const auto ticks = static_cast<std::size_t>(std::ceil(duration_s / tick_s));
  for (std::size_t k = 1; k <= ticks; ++k) {
    const double now = static_cast<double>(k) * tick_s;
    const std::size_t begin = next;
    while (next < spikes.size() && spikes[next].time_s <= now) ++next;
    auto emitted = state.step(spikes.subspan(begin, next - begin), now);
    if (emitted) out.push_back({now, std::move(*emitted)});
  }
  return out;
}

}  // namespace spikecode
