#include "spikecode/filter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace spikecode {

namespace {

using cplx = std::complex<double>;

cplx section_response(const Biquad& s, double omega) {
  const cplx z1 = std::polar(1.0, -omega);
  const cplx z2 = z1 * z1;
  return (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
}

}  // namespace

std::vector<Biquad> butterworth_bandpass(int order, double low_hz, double high_hz, double fs_hz) {
  if (order < 1) throw std::invalid_argument("filter order must be positive");
  if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < 0.5 * fs_hz)) {
    throw std::invalid_argument("band edges must satisfy 0 < low < high < fs/2");
  }
  const double fs2 = 2.0 * fs_hz;
  const double w_lo = fs2 * std::tan(std::numbers::pi * low_hz / fs_hz);
  const double w_hi = fs2 * std::tan(std::numbers::pi * high_hz / fs_hz);
  const double bw = w_hi - w_lo;
  const double w0_sq = w_lo * w_hi;

  std::vector<Biquad> sections;
  sections.reserve(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) {
    // Prototype pole in the left half plane.
    const double phi = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    const cplx p = std::polar(1.0, phi);
    // Low-pass to band-pass maps p onto the roots of s^2 - p*bw*s + w0^2.
    const cplx pb = p * bw;
    const cplx disc = std::sqrt(pb * pb - 4.0 * w0_sq);
    for (const cplx s : {0.5 * (pb + disc), 0.5 * (pb - disc)}) {
      if (s.imag() < 0.0) continue;  // keep one of each conjugate pair
      const cplx z = (fs2 + s) / (fs2 - s);
      Biquad sec;
      sec.b0 = 1.0;
      sec.b1 = 0.0;
      sec.b2 = -1.0;  // zeros at z = 1 and z = -1
      sec.a1 = -2.0 * z.real();
      sec.a2 = std::norm(z);
      sections.push_back(sec);
    }
  }
  if (sections.size() != static_cast<std::size_t>(order)) {
    throw std::logic_error("unexpected pole pairing in band-pass design");
  }

  // Normalize to unit gain at the geometric band centre.
  const double w_center = 2.0 * std::atan(std::sqrt(w0_sq) / fs2);
  for (auto& sec : sections) {
    const double g = 1.0 / std::abs(section_response(sec, w_center));
    sec.b0 *= g;
    sec.b1 *= g;
    sec.b2 *= g;
  }
  return sections;
}

std::vector<double> sosfilt(std::span<const Biquad> sections, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  for (const auto& s : sections) {
    double z1 = 0.0;
    double z2 = 0.0;
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

std::vector<double> sosfiltfilt(std::span<const Biquad> sections, std::span<const double> x) {
  auto y = sosfilt(sections, x);
  std::reverse(y.begin(), y.end());
  y = sosfilt(sections, y);
  std::reverse(y.begin(), y.end());
  return y;
}

std::vector<double> band_limited_noise(std::size_t n_samples, double fs_hz, double low_hz, double high_hz,
                                       double peak, Rng& rng) {
  if (n_samples == 0) return {};
  const auto sections = butterworth_bandpass(4, low_hz, high_hz, fs_hz);
  // Pad with several periods of the lowest pass frequency on both sides.
  const auto pad = static_cast<std::size_t>(std::ceil(4.0 * fs_hz / low_hz));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> raw(n_samples + 2 * pad);
  for (double& v : raw) v = gauss(rng);
  const auto filtered = sosfiltfilt(sections, raw);

  std::vector<double> out(filtered.begin() + static_cast<std::ptrdiff_t>(pad),
                          filtered.begin() + static_cast<std::ptrdiff_t>(pad + n_samples));
  double m = 0.0;
  for (double v : out) m += v;
  m /= static_cast<double>(out.size());
  double max_abs = 0.0;
  for (double& v : out) {
    v -= m;
    max_abs = std::max(max_abs, std::abs(v));
  }
  if (max_abs > 0.0) {
    for (double& v : out) v *= peak / max_abs;
  }
  return out;
}

}  // namespace spikecode
