#include "spikecode/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spikecode/filter.hpp"
#include "spikecode/metrics.hpp"

namespace spikecode {

std::string_view to_string(SignalFamily family) {
  switch (family) {
    case SignalFamily::Sinusoidal: return "Sinusoidal";
    case SignalFamily::Gabor: return "Gabor";
    case SignalFamily::SingleGauss: return "SingleGauss";
    case SignalFamily::DoubleGauss: return "DoubleGauss";
  }
  return "unknown";
}

std::string_view to_string(Preset preset) { return preset == Preset::Sim ? "sim" : "chip"; }

SignalFamily parse_family(std::string_view name) {
  for (auto f : kAllFamilies) {
    std::string a(to_string(f));
    std::string b(name);
    std::transform(a.begin(), a.end(), a.begin(), ::tolower);
    std::transform(b.begin(), b.end(), b.begin(), ::tolower);
    if (a == b) return f;
  }
  throw std::invalid_argument("unknown signal family: " + std::string(name));
}

Preset parse_preset(std::string_view name) {
  if (name == "sim") return Preset::Sim;
  if (name == "chip" || name == "chip-like") return Preset::Chip;
  throw std::invalid_argument("unknown preset: " + std::string(name));
}

std::vector<std::string> param_names(SignalFamily family) {
  switch (family) {
    case SignalFamily::Sinusoidal: return {"amplitude", "frequency_hz"};
    case SignalFamily::Gabor: return {"width_s", "frequency_hz"};
    case SignalFamily::SingleGauss: return {"amplitude", "width_s"};
    case SignalFamily::DoubleGauss: return {"amplitude1", "width1_s", "amplitude2", "width2_s"};
  }
  return {};
}

std::size_t family_arity(SignalFamily family) { return family == SignalFamily::DoubleGauss ? 4 : 2; }

FamilySpec family_spec(SignalFamily family, Preset preset) {
  constexpr double ms = 1e-3;
  FamilySpec spec;
  spec.kind = family;
  const bool sim = preset == Preset::Sim;
  switch (family) {
    case SignalFamily::Sinusoidal:
      spec.ranges = sim ? std::vector<ParamRange>{{1, 6}, {10, 100}} : std::vector<ParamRange>{{5, 10}, {500, 1500}};
      break;
    case SignalFamily::Gabor:
      spec.ranges = sim ? std::vector<ParamRange>{{20 * ms, 40 * ms}, {10, 100}}
                        : std::vector<ParamRange>{{2 * ms, 3 * ms}, {500, 1500}};
      break;
    case SignalFamily::SingleGauss:
      spec.ranges = sim ? std::vector<ParamRange>{{1, 6}, {10 * ms, 30 * ms}}
                        : std::vector<ParamRange>{{1, 6}, {0.2 * ms, 1.3 * ms}};
      break;
    case SignalFamily::DoubleGauss:
      spec.ranges = sim ? std::vector<ParamRange>{{1, 3}, {4 * ms, 10 * ms}, {1, 3}, {4 * ms, 10 * ms}}
                        : std::vector<ParamRange>{{1, 3}, {0.6 * ms, 1 * ms}, {1, 3}, {0.6 * ms, 1 * ms}};
      break;
  }
  // The chip preset keeps the 20 ms offset of the closed form even though its
  // 10 ms window then ends before the second bump peaks.
  spec.second_peak_offset_s = 0.02;
  return spec;
}

std::size_t TimeGrid::size() const {
  const double n = duration_s * fs_hz;
  const double rounded = std::round(n);
  if (!(rounded >= 1.0) || std::abs(n - rounded) > 1e-6 * std::max(1.0, rounded)) {
    throw std::domain_error("duration * fs must be a positive integer sample count");
  }
  return static_cast<std::size_t>(rounded);
}

TimeGrid default_grid(Preset preset) {
  if (preset == Preset::Sim) return TimeGrid{0.2, 5e3};
  return TimeGrid{0.01, 5e4};
}

Waveform evaluate_family(SignalFamily family, std::span<const double> p, const TimeGrid& grid,
                         double second_peak_offset_s) {
  if (p.size() != family_arity(family)) {
    throw std::domain_error("parameter count does not match family arity");
  }
  const std::size_t n = grid.size();
  Waveform x(n);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid.time(k);
    switch (family) {
      case SignalFamily::Sinusoidal:
        x[k] = p[0] * std::sin(two_pi * p[1] * t);
        break;
      case SignalFamily::Gabor:
        x[k] = 3.0 * std::exp(-t * t / (2.0 * p[0] * p[0])) * std::sin(two_pi * p[1] * t);
        break;
      case SignalFamily::SingleGauss:
        x[k] = p[0] * std::exp(-t * t / (2.0 * p[1] * p[1]));
        break;
      case SignalFamily::DoubleGauss: {
        const double u = t - second_peak_offset_s;
        x[k] = p[0] * std::exp(-t * t / (2.0 * p[1] * p[1])) + p[2] * std::exp(-u * u / (2.0 * p[3] * p[3]));
        break;
      }
    }
  }
  return x;
}

Waveform synthesize(const StimulusSpec& spec) {
  if (spec.params.size() != spec.family.arity()) {
    throw std::domain_error("parameter count does not match family arity");
  }
  for (std::size_t i = 0; i < spec.params.size(); ++i) {
    if (!spec.family.ranges[i].contains(spec.params[i])) {
      throw std::domain_error("parameter p" + std::to_string(i + 1) + " outside its range");
    }
  }
  return evaluate_family(spec.family.kind, spec.params, spec.grid, spec.family.second_peak_offset_s);
}

std::vector<ParamVector> sample_params(const FamilySpec& family, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample count must be positive");
  auto rng = make_rng(seed, 0x5a11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ParamVector> out(n, ParamVector(family.arity()));
  for (auto& p : out) {
    for (std::size_t i = 0; i < family.arity(); ++i) {
      const auto& r = family.ranges[i];
      double v = r.lo + (r.hi - r.lo) * unit(rng);
      if (v >= r.hi) v = std::nextafter(r.hi, r.lo);
      p[i] = v;
    }
  }
  return out;
}

ClassificationDataset build_classification_dataset(int n_classes, std::size_t n_examples_per_class, bool aligned,
                                                   std::uint64_t seed) {
  if (n_classes != 6 && n_classes != 8 && n_classes != 10) {
    throw std::invalid_argument("n_classes must be 6, 8 or 10");
  }
  ClassificationDataset ds;
  ds.n_classes = n_classes;
  ds.grid = default_grid(Preset::Sim);
  ds.aligned = aligned;
  ds.seed = seed;
  const double fs = ds.grid.fs_hz;
  const std::size_t n_total = ds.grid.size();
  const auto n_template = static_cast<std::size_t>(std::lround(ds.template_duration_s * fs));
  const std::size_t centred_onset = (n_total - n_template) / 2;

  auto template_rng = make_rng(seed, 0x7e3a);
  while (ds.templates.size() < static_cast<std::size_t>(n_classes)) {
    auto candidate = band_limited_noise(n_template, fs, ds.band_low_hz, ds.band_high_hz, 1.0, template_rng);
    const bool distinct = std::all_of(ds.templates.begin(), ds.templates.end(), [&](const Waveform& other) {
      return std::abs(pearson_r(candidate, other)) < 0.9;
    });
    if (distinct) ds.templates.push_back(std::move(candidate));
  }

  auto noise_rng = make_rng(seed, 0x401e);
  auto shift_rng = make_rng(seed, 0x5f1f);
  std::uniform_real_distribution<double> shift_dist(-ds.shift_range_s, ds.shift_range_s);
  for (int c = 0; c < n_classes; ++c) {
    for (std::size_t e = 0; e < n_examples_per_class; ++e) {
      ClassificationExample ex;
      ex.label = c;
      ex.samples = band_limited_noise(n_total, fs, ds.band_low_hz, ds.band_high_hz, 0.2, noise_rng);
      const auto burst = band_limited_noise(n_template, fs, ds.band_low_hz, ds.band_high_hz, 0.5, noise_rng);
      // Drawn in both conditions so that noise streams stay identical.
      const double drawn = shift_dist(shift_rng);
      ex.shift_s = aligned ? 0.0 : drawn;
      const auto offset = static_cast<std::ptrdiff_t>(centred_onset) + std::lround(ex.shift_s * fs);
      const auto& tpl = ds.templates[static_cast<std::size_t>(c)];
      for (std::size_t k = 0; k < n_template; ++k) {
        const auto pos = offset + static_cast<std::ptrdiff_t>(k);
        if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(n_total)) continue;
        ex.samples[static_cast<std::size_t>(pos)] += tpl[k] + burst[k];
      }
      ds.examples.push_back(std::move(ex));
    }
  }
  return ds;
}

}  // namespace spikecode
