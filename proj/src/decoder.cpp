#include "spikecode/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spikecode/metrics.hpp"

namespace spikecode {

Eigen::MatrixXd encoding_matrix(std::span<const Sample> samples) {
  if (samples.empty()) return {};
  const auto n = static_cast<Eigen::Index>(samples.front().encoding.size());
  Eigen::MatrixXd y(static_cast<Eigen::Index>(samples.size()), n);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    const auto& e = samples[r].encoding.y_star;
    if (static_cast<Eigen::Index>(e.size()) != n) throw std::invalid_argument("encodings differ in length");
    for (Eigen::Index c = 0; c < n; ++c) y(static_cast<Eigen::Index>(r), c) = e[static_cast<std::size_t>(c)];
  }
  return y;
}

Eigen::MatrixXd param_matrix(std::span<const Sample> samples) {
  if (samples.empty()) return {};
  const auto k = static_cast<Eigen::Index>(samples.front().params.size());
  Eigen::MatrixXd p(static_cast<Eigen::Index>(samples.size()), k);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    const auto& v = samples[r].params;
    if (static_cast<Eigen::Index>(v.size()) != k) throw std::invalid_argument("parameter vectors differ in length");
    for (Eigen::Index c = 0; c < k; ++c) p(static_cast<Eigen::Index>(r), c) = v[static_cast<std::size_t>(c)];
  }
  return p;
}

double mean_kendall(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& predicted) {
  double s = 0.0;
  std::vector<double> a(static_cast<std::size_t>(truth.rows()));
  std::vector<double> b(a.size());
  for (Eigen::Index d = 0; d < truth.cols(); ++d) {
    for (Eigen::Index r = 0; r < truth.rows(); ++r) {
      a[static_cast<std::size_t>(r)] = truth(r, d);
      b[static_cast<std::size_t>(r)] = predicted(r, d);
    }
    s += kendall_tau(a, b);
  }
  return truth.cols() > 0 ? s / static_cast<double>(truth.cols()) : 0.0;
}

FitResult fit(std::span<const Sample> train, std::span<const Sample> val, const FitOptions& options) {
  if (train.size() < 2 || val.size() < 2) throw std::invalid_argument("decoder fit needs at least 2 train and 2 val samples");
  const Eigen::MatrixXd y = encoding_matrix(train);
  const Eigen::MatrixXd p = param_matrix(train);
  const Eigen::MatrixXd yv = encoding_matrix(val);
  const Eigen::MatrixXd pv = param_matrix(val);
  if (yv.cols() != y.cols() || pv.cols() != p.cols()) throw std::invalid_argument("train and val shapes differ");
  const Eigen::Index m = y.rows();
  const Eigen::Index n = y.cols();

  const Eigen::VectorXd mu = y.colwise().mean().transpose();
  const Eigen::VectorXd p_mean = p.colwise().mean().transpose();
  const Eigen::MatrixXd xc = y.rowwise() - mu.transpose();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(xc.transpose(), 1.0 / static_cast<double>(std::max<Eigen::Index>(m - 1, 1)));
  cov = cov.selfadjointView<Eigen::Lower>();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("PCA eigen-decomposition failed");
  const Eigen::VectorXd evals = eig.eigenvalues().reverse();
  Eigen::MatrixXd basis = eig.eigenvectors().rowwise().reverse().transpose();  // rows = components
  for (Eigen::Index r = 0; r < basis.rows(); ++r) {
    Eigen::Index arg = 0;
    basis.row(r).cwiseAbs().maxCoeff(&arg);
    if (basis(r, arg) < 0.0) basis.row(r) *= -1.0;
  }

  const double top = std::max(evals.size() > 0 ? evals(0) : 0.0, 0.0);
  const double total = std::max(evals.cwiseMax(0.0).sum(), 0.0);
  Eigen::Index usable = 0;
  while (usable < evals.size() && usable < m - 1 && evals(usable) > 1e-12 * top && top > 0.0) ++usable;
  if (options.k_max > 0) usable = std::min<Eigen::Index>(usable, static_cast<Eigen::Index>(options.k_max));

  FitResult result;
  TrainedDecoder& dec = result.decoder;
  dec.mean = mu;
  dec.intercept = p_mean;
  dec.explained_variance.resize(static_cast<std::size_t>(usable));
  for (Eigen::Index j = 0; j < usable; ++j) dec.explained_variance[static_cast<std::size_t>(j)] = evals(j);

  const Eigen::MatrixXd v = basis.topRows(usable);
  const Eigen::MatrixXd z = xc * v.transpose();  // m x usable
  const Eigen::MatrixXd pc = p.rowwise() - p_mean.transpose();
  Eigen::MatrixXd coef(p.cols(), usable);  // K x usable
  for (Eigen::Index j = 0; j < usable; ++j) {
    const double zz = z.col(j).squaredNorm();
    const double denom = zz > 1e-12 ? zz : zz + options.ridge;
    coef.col(j) = pc.transpose() * z.col(j) / denom;
  }

  const Eigen::MatrixXd zv = (yv.rowwise() - mu.transpose()) * v.transpose();
  Eigen::MatrixXd pred_v = p_mean.transpose().replicate(pv.rows(), 1);
  Eigen::MatrixXd pred_t = p_mean.transpose().replicate(p.rows(), 1);
  double cum = 0.0;
  std::size_t best_k = 0;
  double best = usable > 0 ? -std::numeric_limits<double>::infinity() : 0.0;
  for (Eigen::Index j = 0; j < usable; ++j) {
    pred_v += zv.col(j) * coef.col(j).transpose();
    const double s = mean_kendall(pv, pred_v);
    result.curve.val_kendall.push_back(s);
    if (options.train_curve) {
      pred_t += z.col(j) * coef.col(j).transpose();
      result.curve.train_kendall.push_back(mean_kendall(p, pred_t));
    }
    cum += evals(j);
    result.curve.cumulative_explained.push_back(total > 0.0 ? cum / total : 0.0);
    if (s > best) {
      best = s;
      best_k = static_cast<std::size_t>(j + 1);
    }
  }
  const auto k = static_cast<Eigen::Index>(best_k);
  dec.k = best_k;
  dec.basis = basis.topRows(k);
  dec.regression = coef.leftCols(k);
  result.val_score = best;
  return result;
}

ParamVector predict(const TrainedDecoder& decoder, const Encoding& encoding) {
  if (encoding.size() != decoder.n_inputs()) throw std::invalid_argument("encoding length does not match decoder");
  const Eigen::Map<const Eigen::VectorXd> y(encoding.y_star.data(), static_cast<Eigen::Index>(encoding.size()));
  Eigen::VectorXd out = decoder.intercept;
  if (decoder.k > 0) out += decoder.regression * (decoder.basis * (y - decoder.mean));
  return ParamVector(out.data(), out.data() + out.size());
}

Report score_predictions(std::span<const ParamVector> truth, std::span<const ParamVector> predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("truth and predictions differ in count");
  if (truth.size() < 2) throw std::invalid_argument("evaluation needs at least 2 samples");
  const std::size_t dims = truth.front().size();
  Report rep;
  std::size_t outliers = 0;
  for (std::size_t d = 0; d < dims; ++d) {
    std::vector<double> t(truth.size());
    std::vector<double> p(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
      t[i] = truth[i].at(d);
      p[i] = predicted[i].at(d);
    }
    if (!has_variance(p) || !has_variance(t)) rep.degenerate = true;
    rep.kendall_per_param.push_back(has_variance(p) ? kendall_tau(t, p) : 0.0);

    const double hi = 2.0 * *std::max_element(t.begin(), t.end());
    const double lo = 0.5 * *std::min_element(t.begin(), t.end());
    std::vector<double> tk;
    std::vector<double> pk;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (p[i] > hi || p[i] < lo) {
        ++outliers;
        continue;
      }
      tk.push_back(t[i]);
      pk.push_back(p[i]);
    }
    rep.pearson_per_param.push_back(pk.size() >= 2 && has_variance(pk) ? pearson_r(tk, pk) : 0.0);
  }
  rep.kendall_mean = mean(rep.kendall_per_param);
  rep.pearson_mean = mean(rep.pearson_per_param);
  rep.outlier_pct = 100.0 * static_cast<double>(outliers) / static_cast<double>(truth.size() * std::max<std::size_t>(dims, 1));
  return rep;
}

Report evaluate(const TrainedDecoder& decoder, std::span<const Sample> test) {
  std::vector<ParamVector> truth;
  std::vector<ParamVector> pred;
  truth.reserve(test.size());
  pred.reserve(test.size());
  for (const auto& s : test) {
    truth.push_back(s.params);
    pred.push_back(predict(decoder, s.encoding));
  }
  return score_predictions(truth, pred);
}

}  // namespace spikecode
