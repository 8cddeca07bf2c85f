#include "spikecode/adm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "spikecode/metrics.hpp"
#include "spikecode/random.hpp"

namespace spikecode {

SpikeStream adm_encode(std::span<const double> waveform, double fs_hz, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("ADM delta must be positive");
  if (!(fs_hz > 0.0)) throw std::invalid_argument("sampling rate must be positive");
  for (double v : waveform) {
    if (!std::isfinite(v)) throw std::invalid_argument("ADM input contains non-finite samples");
  }
  SpikeStream out;
  out.delta = delta;
  out.duration_s = static_cast<double>(waveform.size()) / fs_hz;
  if (waveform.empty()) return out;
  out.x0 = waveform[0];
  double ref = waveform[0];
  for (std::size_t k = 1; k < waveform.size(); ++k) {
    const double x = waveform[k];
    const double t = static_cast<double>(k) / fs_hz;
    if (x >= ref + delta) {
      out.up_times.push_back(t);
      ref = (x < ref + 2.0 * delta) ? ref + delta : x;
    } else if (x <= ref - delta) {
      out.dn_times.push_back(t);
      ref = (x > ref - 2.0 * delta) ? ref - delta : x;
    }
  }
  return out;
}

Waveform adm_reconstruct(const SpikeStream& stream, std::size_t n_samples, double fs_hz) {
  Waveform out(n_samples, 0.0);
  // Merge the two sorted channels by walking the grid.
  std::size_t iu = 0;
  std::size_t id = 0;
  double level = 0.0;
  const double half_step = 0.5 / fs_hz;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double t = static_cast<double>(k) / fs_hz + half_step;
    while (iu < stream.up_times.size() && stream.up_times[iu] < t) {
      level += stream.delta;
      ++iu;
    }
    while (id < stream.dn_times.size() && stream.dn_times[id] < t) {
      level -= stream.delta;
      ++id;
    }
    out[k] = level;
  }
  return out;
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> distance_pairs(std::size_t n, const DeltaSearchOptions& options) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const std::size_t total = n * (n - 1) / 2;
  pairs.reserve(std::min(total, options.max_pairs));
  if (total <= options.max_pairs) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    return pairs;
  }
  auto rng = make_rng(options.seed, 0xad3);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  while (pairs.size() < options.max_pairs) {
    std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    pairs.emplace_back(i, j);
  }
  return pairs;
}

double euclidean(const Waveform& a, const Waveform& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

std::vector<double> pair_distances(std::span<const Waveform> xs,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<double> d;
  d.reserve(pairs.size());
  for (auto [i, j] : pairs) d.push_back(euclidean(xs[i], xs[j]));
  return d;
}

double score_with_pairs(std::span<const Waveform> dataset, const std::vector<double>& original, double delta,
                        double fs_hz, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<Waveform> recon;
  recon.reserve(dataset.size());
  for (const auto& x : dataset) recon.push_back(adm_reconstruct(adm_encode(x, fs_hz, delta), x.size(), fs_hz));
  const auto rd = pair_distances(recon, pairs);
  if (!has_variance(rd) || !has_variance(original)) return std::numeric_limits<double>::quiet_NaN();
  return pearson_r(original, rd);
}

void check_dataset(std::span<const Waveform> dataset) {
  if (dataset.size() < 3) throw std::invalid_argument("delta search needs at least 3 waveforms");
  for (const auto& x : dataset) {
    if (x.size() != dataset.front().size()) throw std::invalid_argument("waveforms must share one grid");
  }
}

}  // namespace

double delta_score(std::span<const Waveform> dataset, double delta, double fs_hz, const DeltaSearchOptions& options) {
  check_dataset(dataset);
  const auto pairs = distance_pairs(dataset.size(), options);
  return score_with_pairs(dataset, pair_distances(dataset, pairs), delta, fs_hz, pairs);
}

double optimize_delta(std::span<const Waveform> dataset, std::span<const double> candidates, double fs_hz,
                      const DeltaSearchOptions& options) {
  check_dataset(dataset);
  if (candidates.empty()) throw std::invalid_argument("no delta candidates");
  std::vector<double> sorted(candidates.begin(), candidates.end());
  for (double d : sorted) {
    if (!(d > 0.0)) throw std::invalid_argument("delta candidates must be positive");
  }
  std::sort(sorted.begin(), sorted.end());
  const auto pairs = distance_pairs(dataset.size(), options);
  const auto original = pair_distances(dataset, pairs);

  double best_delta = std::numeric_limits<double>::quiet_NaN();
  double best_score = -std::numeric_limits<double>::infinity();
  for (double d : sorted) {
    const double s = score_with_pairs(dataset, original, d, fs_hz, pairs);
    if (std::isnan(s)) continue;
    if (s > best_score) {
      best_score = s;
      best_delta = d;
    }
  }
  if (std::isnan(best_delta)) throw std::runtime_error("every delta candidate gives degenerate distances");
  return best_delta;
}

std::vector<double> default_delta_candidates(std::span<const Waveform> dataset, std::size_t count) {
  if (dataset.empty() || count == 0) throw std::invalid_argument("empty candidate request");
  std::vector<double> peaks;
  peaks.reserve(dataset.size());
  for (const auto& x : dataset) {
    double p = 0.0;
    for (double v : x) p = std::max(p, std::abs(v));
    peaks.push_back(p);
  }
  const double scale = median(peaks);
  if (!(scale > 0.0)) throw std::invalid_argument("dataset has zero amplitude");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double frac = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = scale * std::pow(10.0, -2.0 + 2.0 * frac);
  }
  return out;
}

}  // namespace spikecode
