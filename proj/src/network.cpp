#include "spikecode/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "spikecode/random.hpp"

namespace spikecode {

TimeConstants NetworkConfig::neuron_taus(std::size_t i) const {
  const auto& e = eta.at(i);
  return {taus.mem_s * (1.0 + e[0]), taus.syn_plus_s * (1.0 + e[1]), taus.syn_minus_s * (1.0 + e[2])};
}

NetworkConfig init_config(std::size_t n, const TimeConstants& taus, std::uint64_t seed, double sigma_het) {
  if (n == 0) throw std::invalid_argument("network needs at least one neuron");
  if (!(taus.mem_s > 0.0 && taus.syn_plus_s > 0.0 && taus.syn_minus_s > 0.0)) {
    throw std::invalid_argument("time constants must be positive");
  }
  if (sigma_het < 0.0) throw std::invalid_argument("sigma_het must be non-negative");
  NetworkConfig cfg;
  cfg.taus = taus;
  cfg.sigma_het = sigma_het;
  cfg.seed = seed;
  cfg.eta.resize(n);
  cfg.weights.resize(n);

  auto eta_rng = make_rng(seed, 0xe7a);
  std::normal_distribution<double> gauss(0.0, sigma_het);
  for (auto& row : cfg.eta) {
    for (double& e : row) {
      if (sigma_het == 0.0) {
        e = 0.0;
        continue;
      }
      do {
        e = gauss(eta_rng);
      } while (1.0 + e <= kMinHeterogeneityFactor);
    }
  }
  auto w_rng = make_rng(seed, 0x3e1);
  std::uniform_int_distribution<int> w_dist(0, 2);
  for (auto& row : cfg.weights) {
    for (int& w : row) w = w_dist(w_rng);
  }
  return cfg;
}

void validate(const NetworkConfig& config) {
  if (config.eta.size() != config.weights.size()) throw std::invalid_argument("eta and weight rows differ");
  if (!(config.theta > 0.0)) throw std::invalid_argument("threshold must be positive");
  for (std::size_t i = 0; i < config.size(); ++i) {
    const auto t = config.neuron_taus(i);
    if (!(t.mem_s > 0.0 && t.syn_plus_s > 0.0 && t.syn_minus_s > 0.0)) {
      throw std::invalid_argument("non-positive effective time constant");
    }
    for (int w : config.weights[i]) {
      if (w < 0 || w > config.w_max) throw std::invalid_argument("weight outside [0, w_max]");
    }
  }
}

std::size_t PopulationResponse::n_fired() const {
  return static_cast<std::size_t>(std::count(fired.begin(), fired.end(), true));
}

PopulationResponse PopulationResponse::silent(std::size_t n) {
  return {std::vector<double>(n, kNoSpike), std::vector<bool>(n, false)};
}

PopulationResponse PopulationResponse::from_times(std::span<const double> times) {
  PopulationResponse r = silent(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::isfinite(times[i])) {
      r.first_spike_s[i] = times[i];
      r.fired[i] = true;
    }
  }
  return r;
}

namespace {

// Response of V over an interval h to a unit current decaying with tau_syn
// while V leaks with tau_mem.
double current_to_voltage(double h, double tau_mem, double tau_syn) {
  const double beta = 1.0 / tau_mem - 1.0 / tau_syn;
  const double x = h * beta;
  const double decay = std::exp(-h / tau_mem);
  if (std::abs(x) < 1e-10) return h * decay;
  return h * decay * std::expm1(x) / x;
}

struct Propagator {
  double mem = 0.0;    // V decay
  double plus = 0.0;   // I+ decay
  double minus = 0.0;  // I- decay
  double v_plus = 0.0;
  double v_minus = 0.0;

  Propagator() = default;
  Propagator(double h, const TimeConstants& t)
      : mem(std::exp(-h / t.mem_s)),
        plus(std::exp(-h / t.syn_plus_s)),
        minus(std::exp(-h / t.syn_minus_s)),
        v_plus(current_to_voltage(h, t.mem_s, t.syn_plus_s)),
        v_minus(current_to_voltage(h, t.mem_s, t.syn_minus_s)) {}
};

struct NeuronState {
  double v = 0.0;
  double i_plus = 0.0;
  double i_minus = 0.0;

  void advance(const Propagator& p) {
    v = v * p.mem + i_plus * p.v_plus - i_minus * p.v_minus;
    i_plus *= p.plus;
    i_minus *= p.minus;
  }
};

struct Event {
  double time;
  bool up;
};

std::vector<Event> merged_events(const SpikeStream& stream) {
  std::vector<Event> ev;
  ev.reserve(stream.size());
  for (double t : stream.up_times) ev.push_back({t, true});
  for (double t : stream.dn_times) ev.push_back({t, false});
  std::stable_sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
  return ev;
}

std::size_t step_count(const SimulationOptions& o) {
  if (!(o.dt_s > 0.0) || !(o.window_s > 0.0)) throw std::invalid_argument("window and dt must be positive");
  return static_cast<std::size_t>(std::llround(std::ceil(o.window_s / o.dt_s - 1e-9)));
}

// Per-neuron driver shared by the batch and trace entry points. `on_sample`
// is called after each grid or event point with (time, V); returning true
// stops the integration.
template <typename OnSample>
void integrate_neuron(const NetworkConfig& cfg, std::size_t neuron, const std::vector<Event>& events,
                      const SimulationOptions& o, OnSample&& on_sample) {
  const auto taus = cfg.neuron_taus(neuron);
  const auto& w = cfg.weights[neuron];
  const double jump_plus_up = cfg.q * w[kPlusUp];
  const double jump_plus_dn = cfg.q * w[kPlusDn];
  const double jump_minus_up = cfg.q * w[kMinusUp];
  const double jump_minus_dn = cfg.q * w[kMinusDn];
  const Propagator full(o.dt_s, taus);
  const std::size_t steps = step_count(o);
  const double tol = 1e-9 * o.dt_s;

  NeuronState s;
  std::size_t next = 0;
  auto apply = [&](const Event& e) {
    if (e.up) {
      s.i_plus += jump_plus_up;
      s.i_minus += jump_minus_up;
    } else {
      s.i_plus += jump_plus_dn;
      s.i_minus += jump_minus_dn;
    }
  };

  for (std::size_t k = 0; k < steps; ++k) {
    const double t0 = static_cast<double>(k) * o.dt_s;
    const double t1 = t0 + o.dt_s;
    while (next < events.size() && events[next].time <= t0 + tol) apply(events[next++]);
    // Nothing pending and nothing left to integrate.
    if (s.i_plus == 0.0 && s.i_minus == 0.0 && s.v == 0.0) {
      if (next == events.size()) return;
      // Skip straight to the step holding the next event.
      const auto jump_to = static_cast<std::size_t>(std::floor((events[next].time + tol) / o.dt_s));
      if (jump_to > k) {
        for (std::size_t kk = k; kk < std::min(jump_to, steps); ++kk) {
          if (on_sample(static_cast<double>(kk + 1) * o.dt_s, 0.0)) return;
        }
        k = jump_to - 1;
        continue;
      }
    }
    double t = t0;
    while (next < events.size() && events[next].time < t1 - tol) {
      const double te = events[next].time;
      s.advance(Propagator(te - t, taus));
      t = te;
      if (on_sample(t, s.v)) return;
      while (next < events.size() && events[next].time <= te + tol) apply(events[next++]);
    }
    if (t == t0) {
      s.advance(full);
    } else {
      s.advance(Propagator(t1 - t, taus));
    }
    if (on_sample(t1, s.v)) return;
  }
}

}  // namespace

void simulate_neurons(const NetworkConfig& config, const SpikeStream& stream, const SimulationOptions& options,
                      std::span<const std::size_t> neurons, PopulationResponse& response) {
  if (response.size() != config.size()) response = PopulationResponse::silent(config.size());
  const auto events = merged_events(stream);
  for (std::size_t i : neurons) {
    response.fired[i] = false;
    response.first_spike_s[i] = kNoSpike;
    double t_prev = 0.0;
    double v_prev = 0.0;
    integrate_neuron(config, i, events, options, [&](double t, double v) {
      if (v >= config.theta) {
        const double frac = (v > v_prev) ? (config.theta - v_prev) / (v - v_prev) : 1.0;
        double ts = t_prev + std::clamp(frac, 0.0, 1.0) * (t - t_prev);
        if (ts >= options.window_s) ts = std::nextafter(options.window_s, 0.0);
        response.first_spike_s[i] = ts;
        response.fired[i] = true;
        return true;
      }
      t_prev = t;
      v_prev = v;
      return false;
    });
  }
}

PopulationResponse simulate(const NetworkConfig& config, const SpikeStream& stream, const SimulationOptions& options) {
  PopulationResponse r = PopulationResponse::silent(config.size());
  std::vector<std::size_t> all(config.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  simulate_neurons(config, stream, options, all, r);
  return r;
}

std::vector<double> membrane_trace(const NetworkConfig& config, const SpikeStream& stream, std::size_t neuron,
                                   const SimulationOptions& options) {
  if (neuron >= config.size()) throw std::out_of_range("neuron index");
  const std::size_t steps = step_count(options);
  std::vector<double> trace(steps + 1, 0.0);
  const auto events = merged_events(stream);
  const double tol = 1e-9 * options.dt_s;
  integrate_neuron(config, neuron, events, options, [&](double t, double v) {
    const double k = t / options.dt_s;
    const double kr = std::round(k);
    if (std::abs(k - kr) * options.dt_s <= tol && kr <= static_cast<double>(steps)) {
      trace[static_cast<std::size_t>(kr)] = v;
    }
    return false;
  });
  return trace;
}

std::vector<NeuronSpike> simulate_continuous(const NetworkConfig& config, const SpikeStream& stream, double duration_s,
                                             double dt_s, double hold_s) {
  const SimulationOptions o{duration_s, dt_s};
  const std::size_t steps = step_count(o);
  const auto events = merged_events(stream);
  std::vector<NeuronSpike> spikes;
  const double tol = 1e-9 * dt_s;
  for (std::size_t i = 0; i < config.size(); ++i) {
    const auto taus = config.neuron_taus(i);
    const auto& w = config.weights[i];
    const Propagator full(dt_s, taus);
    NeuronState s;
    std::size_t next = 0;
    double hold_until = -1.0;
    double v_prev = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      const double t0 = static_cast<double>(k) * dt_s;
      while (next < events.size() && events[next].time < t0 + dt_s - tol) {
        const auto& e = events[next++];
        s.i_plus += config.q * (e.up ? w[kPlusUp] : w[kPlusDn]);
        s.i_minus += config.q * (e.up ? w[kMinusUp] : w[kMinusDn]);
      }
      s.advance(full);
      const double t1 = t0 + dt_s;
      if (t1 < hold_until) {
        s.v = 0.0;
        v_prev = 0.0;
        continue;
      }
      if (s.v >= config.theta) {
        const double frac = (s.v > v_prev) ? (config.theta - v_prev) / (s.v - v_prev) : 1.0;
        spikes.push_back({i, t0 + std::clamp(frac, 0.0, 1.0) * dt_s});
        s.v = 0.0;
        hold_until = t1 + hold_s;
      }
      v_prev = s.v;
    }
  }
  std::stable_sort(spikes.begin(), spikes.end(),
                   [](const NeuronSpike& a, const NeuronSpike& b) { return a.time_s < b.time_s; });
  return spikes;
}

PopulationResponse apply_jitter(const PopulationResponse& response, double sigma_s, std::uint64_t seed) {
  if (sigma_s < 0.0) throw std::invalid_argument("jitter sigma must be non-negative");
  PopulationResponse out = response;
  if (sigma_s == 0.0) return out;
  auto rng = make_rng(seed, 0x717);
  std::normal_distribution<double> gauss(0.0, sigma_s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.fired[i]) out.first_spike_s[i] += gauss(rng);
  }
  return out;
}

PopulationResponse delete_spikes(const PopulationResponse& response, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("deletion fraction must be in [0, 1]");
  PopulationResponse out = response;
  std::vector<std::size_t> fired;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.fired[i]) fired.push_back(i);
  }
  const auto n_delete = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(fired.size()) + 1e-9));
  auto rng = make_rng(seed, 0xde1);
  // Partial Fisher-Yates: the first n_delete entries form a uniform subset.
  for (std::size_t k = 0; k < n_delete; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, fired.size() - 1);
    std::swap(fired[k], fired[pick(rng)]);
    out.fired[fired[k]] = false;
    out.first_spike_s[fired[k]] = kNoSpike;
  }
  return out;
}

namespace {

std::vector<std::size_t> choose_subset(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  idx.resize(count);
  return idx;
}

std::size_t percent_count(double percent, std::size_t n) {
  if (!(percent >= 0.0 && percent <= 100.0)) throw std::invalid_argument("percent must be in [0, 100]");
  return static_cast<std::size_t>(std::floor(percent * static_cast<double>(n) / 100.0 + 1e-9));
}

}  // namespace

NetworkConfig homogenize(const NetworkConfig& config, double percent_weights, double percent_taus,
                         std::uint64_t seed) {
  NetworkConfig out = config;
  const std::size_t n = config.size();
  const std::size_t n_w = percent_count(percent_weights, n);
  const std::size_t n_t = percent_count(percent_taus, n);
  if (n == 0) return out;

  auto w_rng = make_rng(seed, 0x40a);
  std::array<double, 4> w_mean{};
  for (const auto& row : config.weights)
    for (std::size_t c = 0; c < 4; ++c) w_mean[c] += row[c];
  WeightRow mean_row{};
  for (std::size_t c = 0; c < 4; ++c) {
    mean_row[c] = static_cast<int>(std::lround(w_mean[c] / static_cast<double>(n)));
  }
  for (std::size_t i : choose_subset(n, n_w, w_rng)) out.weights[i] = mean_row;

  auto t_rng = make_rng(seed, 0x7a0);
  EtaRow eta_mean{};
  for (const auto& row : config.eta)
    for (std::size_t c = 0; c < 3; ++c) eta_mean[c] += row[c] / static_cast<double>(n);
  for (std::size_t i : choose_subset(n, n_t, t_rng)) out.eta[i] = eta_mean;
  return out;
}

}  // namespace spikecode
