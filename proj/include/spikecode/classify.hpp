#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "spikecode/encoder.hpp"
#include "spikecode/network.hpp"
#include "spikecode/signals.hpp"

namespace spikecode {

/// Pairwise precedence bits, lexicographic over (i < j). A bit is 1 iff both
/// neurons fired and i's time is strictly earlier; ties and pairs with a
/// silent member are 0.
using OrderVector = std::vector<std::uint8_t>;

OrderVector order_vector(const Encoding& encoding);

/// Index of pair (i, j), i < j, in an order vector over n neurons.
inline std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

/// One-vs-rest linear SVM (hinge loss, L2) on standardized features.
struct LinearClassifier {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  Eigen::MatrixXd weights;  // classes x d, in standardized coordinates
  Eigen::VectorXd bias;
  std::vector<int> classes;

  int predict_one(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  std::vector<int> predict(const Eigen::MatrixXd& x) const;
};

struct SvmOptions {
  double c = 1.0;
  double tolerance = 1e-6;  // relative change of the dual objective
  std::size_t max_epochs = 1000;
};

/// Dual coordinate descent on each binary problem; the bias is folded in as
/// a constant feature. Rows of `features` are samples. Throws
/// std::invalid_argument on fewer than two classes or a class with a single
/// sample.
LinearClassifier train_linear_classifier(const Eigen::MatrixXd& features, std::span<const int> labels,
                                         std::uint64_t seed, const SvmOptions& options = {});

double accuracy(const LinearClassifier& clf, const Eigen::MatrixXd& features, std::span<const int> labels);

enum class FeatureMode { Time, Order, Raw };

std::string_view to_string(FeatureMode mode);
FeatureMode parse_feature_mode(std::string_view name);

struct LabeledFeatures {
  Eigen::MatrixXd x;
  std::vector<int> labels;
};

/// Stacks y* vectors (time) or order vectors (order) as rows.
Eigen::MatrixXd encoding_features(std::span<const Encoding> encodings, FeatureMode mode);

struct SplitProtocol {
  std::size_t splits = 200;
  std::size_t n_train = 400;
  std::size_t n_test = 100;
  std::uint64_t seed = 0;
};

/// Random train/test splits (disjoint draws without replacement); returns the
/// test accuracy of each split.
std::vector<double> classify_experiment(const LabeledFeatures& data, const SplitProtocol& protocol,
                                        const SvmOptions& options = {});

/// ADM-converts waveforms with one threshold and records the network's first
/// spikes over the grid window.
std::vector<Encoding> encode_waveforms(const NetworkConfig& config, std::span<const Waveform> waveforms,
                                       const TimeGrid& grid, double delta);

/// Threshold chosen on (up to `search_size`) waveforms of a dataset.
double dataset_delta(std::span<const Waveform> waveforms, double fs_hz, std::size_t search_size = 100);

/// Features for the filtered-noise set in the given mode.
LabeledFeatures dataset_features(const ClassificationDataset& dataset, const NetworkConfig* config, FeatureMode mode,
                                 double delta);

/// Stimulus-type task: `per_family` random stimuli of each family, labelled
/// by family, sharing one ADM threshold.
struct FamilyTask {
  std::vector<Waveform> waveforms;
  std::vector<int> labels;
  TimeGrid grid;
  double delta = 0.0;
};

FamilyTask build_family_task(std::size_t per_family, Preset preset, std::uint64_t seed);

LabeledFeatures family_task_features(const FamilyTask& task, const NetworkConfig& config, FeatureMode mode);

}  // namespace spikecode
