#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spikecode/random.hpp"

namespace spikecode {

enum class SignalFamily { Sinusoidal, Gabor, SingleGauss, DoubleGauss };

inline constexpr SignalFamily kAllFamilies[] = {SignalFamily::Sinusoidal, SignalFamily::Gabor,
                                                SignalFamily::SingleGauss, SignalFamily::DoubleGauss};

/// Parameter ranges and timing are either the simulation values or the
/// range set used for the mixed-signal chip (shorter, faster stimuli).
enum class Preset { Sim, Chip };

std::string_view to_string(SignalFamily family);
std::string_view to_string(Preset preset);
SignalFamily parse_family(std::string_view name);
Preset parse_preset(std::string_view name);

/// Half-open interval [lo, hi).
struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v < hi; }
};

/// Family identity plus its parameter box. Widths are seconds, frequencies Hz.
struct FamilySpec {
  SignalFamily kind = SignalFamily::Sinusoidal;
  std::vector<ParamRange> ranges;
  /// Delay of the second DoubleGauss bump.
  double second_peak_offset_s = 0.02;

  std::size_t arity() const { return ranges.size(); }
};

FamilySpec family_spec(SignalFamily family, Preset preset = Preset::Sim);
std::size_t family_arity(SignalFamily family);
/// Column names of a family's parameter vector.
std::vector<std::string> param_names(SignalFamily family);

/// Sample grid centred on zero: t_k = -duration/2 + k / fs for k in [0, size).
struct TimeGrid {
  double duration_s = 0.2;
  double fs_hz = 5000.0;

  std::size_t size() const;
  double time(std::size_t k) const { return -0.5 * duration_s + static_cast<double>(k) / fs_hz; }
  double dt() const { return 1.0 / fs_hz; }
};

TimeGrid default_grid(Preset preset);

using ParamVector = std::vector<double>;
using Waveform = std::vector<double>;

struct StimulusSpec {
  FamilySpec family;
  ParamVector params;
  TimeGrid grid;
};

/// Closed-form family waveform on the grid. Throws std::domain_error when a
/// parameter is outside its range or the arity is wrong.
Waveform synthesize(const StimulusSpec& spec);

/// Same as synthesize but without range checks; used for out-of-range probes.
Waveform evaluate_family(SignalFamily family, std::span<const double> params, const TimeGrid& grid,
                         double second_peak_offset_s = 0.02);

/// n i.i.d. uniform draws from the family's parameter box.
std::vector<ParamVector> sample_params(const FamilySpec& family, std::size_t n, std::uint64_t seed);

// Filtered-noise classification set.

struct ClassificationExample {
  Waveform samples;
  int label = 0;
  /// Template onset shift actually drawn (seconds, 0 when aligned).
  double shift_s = 0.0;
};

struct ClassificationDataset {
  int n_classes = 6;
  TimeGrid grid;
  double template_duration_s = 0.1;
  double band_low_hz = 10.0;
  double band_high_hz = 100.0;
  double shift_range_s = 0.02;
  bool aligned = true;
  std::uint64_t seed = 0;
  std::vector<Waveform> templates;
  std::vector<ClassificationExample> examples;
};

/// Templates are unit-peak band-limited noise; each example adds a second
/// 0.5-peak noise burst on the template span and 0.2-peak background over the
/// full 200 ms. Noise realizations depend only on `seed`, so the aligned and
/// not-aligned sets built from one seed differ only in the onset shifts.
ClassificationDataset build_classification_dataset(int n_classes, std::size_t n_examples_per_class, bool aligned,
                                                   std::uint64_t seed);

}  // namespace spikecode
