#pragma once

#include <span>
#include <vector>

#include "spikecode/random.hpp"

namespace spikecode {

/// Second-order IIR section, direct form II transposed; a0 normalized to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

/// Digital Butterworth band-pass designed by bilinear transform with
/// prewarping. `order` is the low-pass prototype order, so the result has
/// 2*order poles arranged in `order` biquads. Unit gain at the band center.
std::vector<Biquad> butterworth_bandpass(int order, double low_hz, double high_hz, double fs_hz);

std::vector<double> sosfilt(std::span<const Biquad> sections, std::span<const double> x);

/// Zero-phase forward-backward filtering.
std::vector<double> sosfiltfilt(std::span<const Biquad> sections, std::span<const double> x);

/// White Gaussian noise filtered into [low_hz, high_hz], mean removed and
/// rescaled so its peak absolute value equals `peak`. A longer segment is
/// filtered and the centre cropped, so the output carries no edge transient.
std::vector<double> band_limited_noise(std::size_t n_samples, double fs_hz, double low_hz, double high_hz,
                                       double peak, Rng& rng);

}  // namespace spikecode
