#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "spikecode/encoder.hpp"
#include "spikecode/signals.hpp"

namespace spikecode {

struct Sample {
  Encoding encoding;
  ParamVector params;
};

/// PCA projection followed by an affine map to parameter estimates.
struct TrainedDecoder {
  Eigen::VectorXd mean;        // n
  Eigen::MatrixXd basis;       // k x n, orthonormal rows by decreasing variance
  Eigen::MatrixXd regression;  // K x k
  Eigen::VectorXd intercept;   // K
  std::size_t k = 0;
  std::vector<double> explained_variance;  // every fitted component, not only the first k

  std::size_t n_inputs() const { return static_cast<std::size_t>(mean.size()); }
  std::size_t n_outputs() const { return static_cast<std::size_t>(intercept.size()); }
};

struct FitOptions {
  /// Upper limit on the number of components scanned (0 = no limit).
  std::size_t k_max = 0;
  double ridge = 1e-8;
  bool train_curve = true;
};

/// Scores per component count k = 1..k_max (index k - 1).
struct SelectionCurve {
  std::vector<double> train_kendall;
  std::vector<double> val_kendall;
  std::vector<double> cumulative_explained;
};

struct FitResult {
  TrainedDecoder decoder;
  SelectionCurve curve;
  double val_score = 0.0;
};

/// Fits PCA on the training encodings, scans k by validation mean
/// Kendall-tau (ties keep the smaller k) and keeps the least-squares readout
/// at the selected k. Components are uncorrelated on the training set, so the
/// least-squares coefficients of the first k scores do not depend on k.
FitResult fit(std::span<const Sample> train, std::span<const Sample> val, const FitOptions& options = {});

/// Throws std::invalid_argument on a length mismatch.
ParamVector predict(const TrainedDecoder& decoder, const Encoding& encoding);

struct Report {
  std::vector<double> kendall_per_param;
  double kendall_mean = 0.0;
  std::vector<double> pearson_per_param;
  double pearson_mean = 0.0;
  double outlier_pct = 0.0;
  bool degenerate = false;
};

/// Predictions above 2 x max or below 0.5 x min of a dimension's true values
/// are outliers and are left out of that dimension's Pearson r.
Report evaluate(const TrainedDecoder& decoder, std::span<const Sample> test);

Report score_predictions(std::span<const ParamVector> truth, std::span<const ParamVector> predicted);

/// Mean over parameter dimensions of Kendall-tau between truth and predictions.
double mean_kendall(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& predicted);

Eigen::MatrixXd encoding_matrix(std::span<const Sample> samples);
Eigen::MatrixXd param_matrix(std::span<const Sample> samples);

}  // namespace spikecode
