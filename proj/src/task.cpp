#include "spikecode/task.hpp"

#include <cmath>
#include <stdexcept>

namespace spikecode {

SimulationOptions simulation_options(const TimeGrid& grid) { return {grid.duration_s, grid.dt()}; }

StimulusSet make_stimulus_set(SignalFamily family, Preset preset, std::span<const ParamVector> params, double delta) {
  const auto spec = family_spec(family, preset);
  const auto grid = default_grid(preset);
  StimulusSet set;
  for (const auto& p : params) {
    const auto x = synthesize({spec, p, grid});
    set.params.push_back(p);
    set.streams.push_back(adm_encode(x, grid.fs_hz, delta));
  }
  return set;
}

TaskData build_task(SignalFamily family, const TaskOptions& options, std::uint64_t seed) {
  if (options.n_stimuli < 6) throw std::invalid_argument("task needs at least 6 stimuli");
  if (!(options.train_fraction > 0.0 && options.val_fraction > 0.0 &&
        options.train_fraction + options.val_fraction < 1.0)) {
    throw std::invalid_argument("split fractions must leave room for a test set");
  }
  TaskData task;
  task.family = family;
  task.preset = options.preset;
  task.grid = default_grid(options.preset);
  task.seed = seed;
  const auto spec = family_spec(family, options.preset);
  const auto params = sample_params(spec, options.n_stimuli, derive_seed(seed, 0x7a5));

  const auto n_train = static_cast<std::size_t>(std::lround(options.train_fraction * options.n_stimuli));
  const auto n_val = static_cast<std::size_t>(std::lround(options.val_fraction * options.n_stimuli));
  const std::span<const ParamVector> all(params);
  const auto train_p = all.subspan(0, n_train);
  const auto val_p = all.subspan(n_train, n_val);
  const auto test_p = all.subspan(n_train + n_val);

  if (options.delta > 0.0) {
    task.delta = options.delta;
  } else {
    std::vector<Waveform> search;
    for (std::size_t i = 0; i < std::min(options.delta_search_size, train_p.size()); ++i) {
      search.push_back(synthesize({spec, train_p[i], task.grid}));
    }
    task.delta = optimize_delta(search, default_delta_candidates(search), task.grid.fs_hz,
                                {2000, derive_seed(seed, 0xde7)});
  }
  task.train = make_stimulus_set(family, options.preset, train_p, task.delta);
  task.val = make_stimulus_set(family, options.preset, val_p, task.delta);
  task.test = make_stimulus_set(family, options.preset, test_p, task.delta);
  return task;
}

std::vector<PopulationResponse> simulate_set(const NetworkConfig& config, const StimulusSet& set,
                                             const SimulationOptions& options) {
  std::vector<PopulationResponse> out;
  out.reserve(set.size());
  for (const auto& s : set.streams) out.push_back(simulate(config, s, options));
  return out;
}

std::vector<Sample> make_samples(std::span<const PopulationResponse> responses, std::span<const ParamVector> params) {
  if (responses.size() != params.size()) throw std::invalid_argument("responses and params differ in count");
  std::vector<Sample> out;
  out.reserve(responses.size());
  for (std::size_t i = 0; i < responses.size(); ++i) out.push_back({encode(responses[i]), params[i]});
  return out;
}

}  // namespace spikecode
