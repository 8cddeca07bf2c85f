#include "spikecode/classify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "spikecode/adm.hpp"
#include "spikecode/random.hpp"
#include "spikecode/task.hpp"

namespace spikecode {

OrderVector order_vector(const Encoding& e) {
  const std::size_t n = e.size();
  OrderVector bits(n < 2 ? 0 : n * (n - 1) / 2, 0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      bits[k] = e.fired[i] && e.fired[j] && e.y_star[i] < e.y_star[j];
    }
  }
  return bits;
}

int LinearClassifier::predict_one(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::VectorXd z = (x - mean).cwiseQuotient(scale);
  const Eigen::VectorXd s = weights * z + bias;
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < s.size(); ++c) {
    if (s(c) > s(best)) best = c;
  }
  return classes[static_cast<std::size_t>(best)];
}

std::vector<int> LinearClassifier::predict(const Eigen::MatrixXd& x) const {
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) out[static_cast<std::size_t>(r)] = predict_one(x.row(r).transpose());
  return out;
}

LinearClassifier train_linear_classifier(const Eigen::MatrixXd& features, std::span<const int> labels,
                                         std::uint64_t seed, const SvmOptions& options) {
  const auto m = static_cast<std::size_t>(features.rows());
  if (labels.size() != m) throw std::invalid_argument("label count does not match feature rows");
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  if (counts.size() < 2) throw std::invalid_argument("classifier needs at least two classes");
  for (const auto& [label, count] : counts) {
    if (count < 2) throw std::invalid_argument("class " + std::to_string(label) + " has fewer than two samples");
  }

  LinearClassifier clf;
  for (const auto& kv : counts) clf.classes.push_back(kv.first);
  clf.mean = features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = features.rowwise() - clf.mean.transpose();
  clf.scale = (centered.colwise().squaredNorm() / static_cast<double>(m)).cwiseSqrt().transpose();
  for (Eigen::Index j = 0; j < clf.scale.size(); ++j) {
    if (!(clf.scale(j) > 1e-12)) clf.scale(j) = 1.0;
  }
  const Eigen::MatrixXd xs = centered.array().rowwise() / clf.scale.transpose().array();
  Eigen::MatrixXd gram = xs * xs.transpose();
  gram.array() += 1.0;

  const auto n_classes = static_cast<Eigen::Index>(clf.classes.size());
  clf.weights.resize(n_classes, features.cols());
  clf.bias.resize(n_classes);
  auto rng = make_rng(seed, 0x5f3);
  std::vector<std::size_t> perm(m);
  const double c_bound = options.c;

  for (Eigen::Index c = 0; c < n_classes; ++c) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) y(static_cast<Eigen::Index>(i)) = labels[i] == clf.classes[c] ? 1.0 : -1.0;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));  // K (alpha * y)
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double prev_obj = 0.0;
    for (std::size_t epoch = 0; epoch < options.max_epochs; ++epoch) {
      std::shuffle(perm.begin(), perm.end(), rng);
      for (std::size_t idx : perm) {
        const auto i = static_cast<Eigen::Index>(idx);
        const double g = y(i) * f(i) - 1.0;
        const double a = alpha(i);
        if ((a <= 0.0 && g >= 0.0) || (a >= c_bound && g <= 0.0)) continue;
        const double a_new = std::clamp(a - g / gram(i, i), 0.0, c_bound);
        const double d = (a_new - a) * y(i);
        if (d == 0.0) continue;
        alpha(i) = a_new;
        f.noalias() += d * gram.col(i);
      }
      const double obj = 0.5 * alpha.dot(y.cwiseProduct(f)) - alpha.sum();
      const bool done = epoch > 0 && std::abs(obj - prev_obj) <= options.tolerance * std::max(std::abs(obj), 1e-300);
      prev_obj = obj;
      if (done) break;
    }
    const Eigen::VectorXd ay = alpha.cwiseProduct(y);
    clf.weights.row(c) = (xs.transpose() * ay).transpose();
    clf.bias(c) = ay.sum();
  }
  return clf;
}

double accuracy(const LinearClassifier& clf, const Eigen::MatrixXd& features, std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  const auto pred = clf.predict(features);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += pred[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

std::string_view to_string(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::Time: return "time";
    case FeatureMode::Order: return "order";
    case FeatureMode::Raw: return "raw";
  }
  return "?";
}

FeatureMode parse_feature_mode(std::string_view name) {
  if (name == "time") return FeatureMode::Time;
  if (name == "order") return FeatureMode::Order;
  if (name == "raw") return FeatureMode::Raw;
  throw std::invalid_argument("unknown feature mode: " + std::string(name));
}

Eigen::MatrixXd encoding_features(std::span<const Encoding> encodings, FeatureMode mode) {
  if (encodings.empty()) return {};
  const std::size_t n = encodings.front().size();
  if (mode == FeatureMode::Raw) throw std::invalid_argument("raw features come from waveforms");
  const std::size_t d = mode == FeatureMode::Time ? n : n * (n - 1) / 2;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(encodings.size()), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < encodings.size(); ++r) {
    const auto& e = encodings[r];
    if (e.size() != n) throw std::invalid_argument("encodings differ in length");
    const auto row = static_cast<Eigen::Index>(r);
    if (mode == FeatureMode::Time) {
      for (std::size_t i = 0; i < n; ++i) x(row, static_cast<Eigen::Index>(i)) = e.y_star[i];
    } else {
      const auto bits = order_vector(e);
      for (std::size_t i = 0; i < d; ++i) x(row, static_cast<Eigen::Index>(i)) = bits[i];
    }
  }
  return x;
}

std::vector<double> classify_experiment(const LabeledFeatures& data, const SplitProtocol& protocol,
                                        const SvmOptions& options) {
  const auto m = static_cast<std::size_t>(data.x.rows());
  if (data.labels.size() != m) throw std::invalid_argument("label count does not match feature rows");
  if (protocol.n_train + protocol.n_test > m) {
    throw std::invalid_argument("split sizes exceed the number of samples");
  }
  std::vector<double> acc;
  acc.reserve(protocol.splits);
  std::vector<std::size_t> perm(m);
  for (std::size_t s = 0; s < protocol.splits; ++s) {
    auto rng = make_rng(protocol.seed, 0x5000 + s);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd xtr(static_cast<Eigen::Index>(protocol.n_train), data.x.cols());
    Eigen::MatrixXd xte(static_cast<Eigen::Index>(protocol.n_test), data.x.cols());
    std::vector<int> ytr(protocol.n_train);
    std::vector<int> yte(protocol.n_test);
    for (std::size_t i = 0; i < protocol.n_train; ++i) {
      xtr.row(static_cast<Eigen::Index>(i)) = data.x.row(static_cast<Eigen::Index>(perm[i]));
      ytr[i] = data.labels[perm[i]];
    }
    for (std::size_t i = 0; i < protocol.n_test; ++i) {
      const std::size_t src = perm[protocol.n_train + i];
      xte.row(static_cast<Eigen::Index>(i)) = data.x.row(static_cast<Eigen::Index>(src));
      yte[i] = data.labels[src];
    }
    const auto clf = train_linear_classifier(xtr, ytr, derive_seed(protocol.seed, s), options);
    acc.push_back(accuracy(clf, xte, yte));
  }
  return acc;
}

std::vector<Encoding> encode_waveforms(const NetworkConfig& config, std::span<const Waveform> waveforms,
                                       const TimeGrid& grid, double delta) {
  const auto sim = simulation_options(grid);
  std::vector<Encoding> out;
  out.reserve(waveforms.size());
  for (const auto& w : waveforms) {
    out.push_back(encode(simulate(config, adm_encode(w, grid.fs_hz, delta), sim)));
  }
  return out;
}

double dataset_delta(std::span<const Waveform> waveforms, double fs_hz, std::size_t search_size) {
  if (waveforms.empty()) throw std::invalid_argument("empty waveform set");
  const std::size_t count = std::min(search_size, waveforms.size());
  std::vector<Waveform> subset;
  subset.reserve(count);
  // Evenly strided so class- or family-blocked sets are all represented.
  for (std::size_t i = 0; i < count; ++i) subset.push_back(waveforms[i * waveforms.size() / count]);
  return optimize_delta(subset, default_delta_candidates(subset), fs_hz);
}

LabeledFeatures dataset_features(const ClassificationDataset& dataset, const NetworkConfig* config, FeatureMode mode,
                                 double delta) {
  LabeledFeatures out;
  std::vector<Waveform> waves;
  waves.reserve(dataset.examples.size());
  for (const auto& ex : dataset.examples) {
    waves.push_back(ex.samples);
    out.labels.push_back(ex.label);
  }
  if (mode == FeatureMode::Raw) {
    const std::size_t len = waves.empty() ? 0 : waves.front().size();
    out.x.resize(static_cast<Eigen::Index>(waves.size()), static_cast<Eigen::Index>(len));
    for (std::size_t r = 0; r < waves.size(); ++r) {
      out.x.row(static_cast<Eigen::Index>(r)) = Eigen::Map<const Eigen::RowVectorXd>(waves[r].data(),
                                                                                     static_cast<Eigen::Index>(len));
    }
    return out;
  }
  if (config == nullptr) throw std::invalid_argument("time/order features need a network");
  out.x = encoding_features(encode_waveforms(*config, waves, dataset.grid, delta), mode);
  return out;
}

FamilyTask build_family_task(std::size_t per_family, Preset preset, std::uint64_t seed) {
  FamilyTask task;
  task.grid = default_grid(preset);
  for (auto family : kAllFamilies) {
    const auto spec = family_spec(family, preset);
    for (const auto& p : sample_params(spec, per_family, derive_seed(seed, 0xfa00 + static_cast<std::uint64_t>(family)))) {
      task.waveforms.push_back(synthesize({spec, p, task.grid}));
      task.labels.push_back(static_cast<int>(family));
    }
  }
  task.delta = dataset_delta(task.waveforms, task.grid.fs_hz);
  return task;
}

LabeledFeatures family_task_features(const FamilyTask& task, const NetworkConfig& config, FeatureMode mode) {
  if (mode == FeatureMode::Raw) throw std::invalid_argument("family task uses time or order features");
  return {encoding_features(encode_waveforms(config, task.waveforms, task.grid, task.delta), mode), task.labels};
}

}  // namespace spikecode
