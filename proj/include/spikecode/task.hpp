#pragma once

#include <cstdint>
#include <vector>

#include "spikecode/adm.hpp"
#include "spikecode/decoder.hpp"
#include "spikecode/network.hpp"
#include "spikecode/signals.hpp"

namespace spikecode {

/// Stimuli of one split, already converted to event streams.
struct StimulusSet {
  std::vector<ParamVector> params;
  std::vector<SpikeStream> streams;

  std::size_t size() const { return params.size(); }
};

struct TaskOptions {
  Preset preset = Preset::Sim;
  std::size_t n_stimuli = 300;
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  /// Fixed ADM threshold; <= 0 selects it from the training waveforms.
  double delta = 0.0;
  /// Number of training waveforms used for the threshold search.
  std::size_t delta_search_size = 100;
};

/// Sampled, synthesized and ADM-converted stimuli split into train/val/test.
struct TaskData {
  SignalFamily family = SignalFamily::DoubleGauss;
  Preset preset = Preset::Sim;
  TimeGrid grid;
  double delta = 0.0;
  std::uint64_t seed = 0;
  StimulusSet train;
  StimulusSet val;
  StimulusSet test;
};

TaskData build_task(SignalFamily family, const TaskOptions& options, std::uint64_t seed);

/// Converts parameter vectors of `family` into streams with a given delta.
StimulusSet make_stimulus_set(SignalFamily family, Preset preset, std::span<const ParamVector> params, double delta);

SimulationOptions simulation_options(const TimeGrid& grid);

std::vector<PopulationResponse> simulate_set(const NetworkConfig& config, const StimulusSet& set,
                                             const SimulationOptions& options);

std::vector<Sample> make_samples(std::span<const PopulationResponse> responses, std::span<const ParamVector> params);

}  // namespace spikecode
