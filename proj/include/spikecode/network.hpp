#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "spikecode/adm.hpp"

namespace spikecode {

/// Shared (population-level) time constants in seconds.
struct TimeConstants {
  double mem_s = 0.02;
  double syn_plus_s = 0.02;
  double syn_minus_s = 0.02;

  bool operator==(const TimeConstants&) const = default;
};

/// Column order of NetworkConfig::weights.
enum WeightSlot : std::size_t { kPlusUp = 0, kPlusDn = 1, kMinusUp = 2, kMinusDn = 3 };

using WeightRow = std::array<int, 4>;
/// Heterogeneity draws for (mem, syn+, syn-).
using EtaRow = std::array<double, 3>;

/// Shallow population of exp-LIF neurons fed by the UP/DN channels.
///
/// Neuron i uses tau * (1 + eta[i][c]) for each shared constant. Synaptic
/// currents jump by weight * q at every event of the matching channel; the
/// membrane integrates I+ - I- with leak and fires once when V >= theta.
/// Currents are in theta per second.
struct NetworkConfig {
  TimeConstants taus;
  std::vector<EtaRow> eta;
  std::vector<WeightRow> weights;
  double theta = 1.0;
  double q = 30.0;
  double sigma_het = 0.2;
  int w_max = 64;
  std::uint64_t seed = 0;

  std::size_t size() const { return weights.size(); }
  TimeConstants neuron_taus(std::size_t i) const;
  bool operator==(const NetworkConfig&) const = default;
};

/// Lower bound on 1 + eta; draws at or below it are redrawn.
inline constexpr double kMinHeterogeneityFactor = 0.05;

/// eta ~ N(0, sigma_het) per neuron and constant, weights uniform in {0,1,2}.
NetworkConfig init_config(std::size_t n, const TimeConstants& taus, std::uint64_t seed, double sigma_het = 0.2);

/// Throws std::invalid_argument when a config breaks its invariants.
void validate(const NetworkConfig& config);

inline constexpr double kNoSpike = std::numeric_limits<double>::infinity();

struct PopulationResponse {
  std::vector<double> first_spike_s;
  std::vector<bool> fired;

  std::size_t size() const { return fired.size(); }
  std::size_t n_fired() const;
  static PopulationResponse silent(std::size_t n);
  /// Response with the given spike times; kNoSpike (or any non-finite value) marks silence.
  static PopulationResponse from_times(std::span<const double> times);
};

struct SimulationOptions {
  double window_s = 0.2;
  double dt_s = 2e-4;
};

/// Integrates every neuron over [0, window). Between grid points and events
/// the linear ODEs are propagated exactly; the first threshold crossing is
/// located by linear interpolation between the two bracketing samples.
PopulationResponse simulate(const NetworkConfig& config, const SpikeStream& stream, const SimulationOptions& options);

/// Re-simulates only `neurons`, writing their entries of `response`.
void simulate_neurons(const NetworkConfig& config, const SpikeStream& stream, const SimulationOptions& options,
                      std::span<const std::size_t> neurons, PopulationResponse& response);

/// Membrane potential of one neuron on the grid t_k = k * dt with firing disabled.
std::vector<double> membrane_trace(const NetworkConfig& config, const SpikeStream& stream, std::size_t neuron,
                                   const SimulationOptions& options);

struct NeuronSpike {
  std::size_t neuron = 0;
  double time_s = 0.0;
};

/// Free-running simulation for always-on streams: after a spike a neuron is
/// clamped at V = 0 for `hold_s` and then re-armed, so each neuron fires at
/// most once per hold interval. Output sorted by time.
std::vector<NeuronSpike> simulate_continuous(const NetworkConfig& config, const SpikeStream& stream, double duration_s,
                                             double dt_s, double hold_s);

PopulationResponse apply_jitter(const PopulationResponse& response, double sigma_s, std::uint64_t seed);

/// Silences floor(fraction * n_fired) fired neurons chosen without replacement.
PopulationResponse delete_spikes(const PopulationResponse& response, double fraction, std::uint64_t seed);

/// Replaces the weights of floor(percent_weights * n / 100) random neurons by the
/// rounded column means, and the eta of floor(percent_taus * n / 100) random
/// neurons by the column means of eta (equal effective time constants).
NetworkConfig homogenize(const NetworkConfig& config, double percent_weights, double percent_taus,
                         std::uint64_t seed);

}  // namespace spikecode
