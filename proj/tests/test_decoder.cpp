#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "spikecode/decoder.hpp"
#include "spikecode/metrics.hpp"

using namespace spikecode;

namespace {

// y* = A p + b for a fixed random A (n x K); every neuron marked fired.
std::vector<Sample> linear_samples(std::size_t count, std::size_t n, std::size_t k, std::uint64_t seed,
                                   double noise = 0.0) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, k);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  std::mt19937_64 prng(seed);
  std::uniform_real_distribution<double> u(1.0, 5.0);
  std::vector<Sample> out;
  for (std::size_t s = 0; s < count; ++s) {
    Eigen::VectorXd p(k);
    for (std::size_t d = 0; d < k; ++d) p(d) = u(prng);
    Eigen::VectorXd y = a * p;
    Sample smp;
    smp.params.assign(p.data(), p.data() + k);
    smp.encoding.y_star.resize(n);
    smp.encoding.fired.assign(n, true);
    smp.encoding.n_fired = n;
    for (std::size_t i = 0; i < n; ++i) smp.encoding.y_star[i] = y(i) + noise * g(prng);
    out.push_back(std::move(smp));
  }
  return out;
}

}  // namespace

TEST(Fit, ExactLinearRecovery) {
  const auto train = linear_samples(80, 20, 3, 1);
  const auto val = linear_samples(30, 20, 3, 2);
  const auto f = fit(train, val);
  EXPECT_DOUBLE_EQ(f.val_score, 1.0);
  EXPECT_LE(f.decoder.k, 3u);
  for (const auto& s : linear_samples(10, 20, 3, 3)) {
    const auto p = predict(f.decoder, s.encoding);
    for (std::size_t d = 0; d < 3; ++d) EXPECT_NEAR(p[d], s.params[d], 1e-6);
  }
}

TEST(Fit, SameTrainAndValSelectsAtMostK) {
  const auto data = linear_samples(60, 15, 2, 5);
  EXPECT_LE(fit(data, data).decoder.k, 2u);
}

TEST(Fit, BasisOrthonormalAndSigned) {
  const auto train = linear_samples(50, 12, 4, 7, 0.3);
  const auto f = fit(train, linear_samples(20, 12, 4, 8, 0.3));
  const auto& b = f.decoder.basis;
  ASSERT_GT(b.rows(), 0);
  const Eigen::MatrixXd gram = b * b.transpose();
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(b.rows(), b.rows())).cwiseAbs().maxCoeff(), 1e-8);
  for (Eigen::Index r = 0; r < b.rows(); ++r) {
    Eigen::Index arg = 0;
    b.row(r).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(b(r, arg), 0.0);
  }
  EXPECT_LE(f.decoder.k, std::min<std::size_t>(12, 50));
  const auto again = fit(train, linear_samples(20, 12, 4, 8, 0.3));
  EXPECT_EQ(again.decoder.basis, b);
  EXPECT_EQ(again.decoder.regression, f.decoder.regression);
}

TEST(Fit, CurveShapesAndExplainedVariance) {
  const auto train = linear_samples(60, 30, 2, 11, 0.5);
  const auto f = fit(train, linear_samples(30, 30, 2, 12, 0.5));
  const auto& c = f.curve;
  ASSERT_EQ(c.train_kendall.size(), c.val_kendall.size());
  for (std::size_t k = 1; k < c.cumulative_explained.size(); ++k) {
    EXPECT_GE(c.cumulative_explained[k], c.cumulative_explained[k - 1]);
  }
  EXPECT_LE(c.cumulative_explained.back(), 1.0 + 1e-12);
  // Projection residual of the training set.
  const Eigen::MatrixXd x = encoding_matrix(train);
  const Eigen::MatrixXd centered = x.rowwise() - f.decoder.mean.transpose();
  const Eigen::MatrixXd recon = centered * f.decoder.basis.transpose() * f.decoder.basis;
  const double rel = (centered - recon).squaredNorm() / centered.squaredNorm();
  EXPECT_LE(rel, 1.0 - c.cumulative_explained[f.decoder.k - 1] + 1e-9);
}

TEST(Fit, NeedsTwoSamples) {
  const auto one = linear_samples(1, 5, 1, 1);
  const auto many = linear_samples(10, 5, 1, 1);
  EXPECT_THROW(fit(one, many), std::invalid_argument);
  EXPECT_THROW(fit(many, one), std::invalid_argument);
}

TEST(Predict, MeanGivesIntercept) {
  const auto train = linear_samples(40, 10, 2, 3, 0.1);
  const auto f = fit(train, linear_samples(20, 10, 2, 4, 0.1));
  Encoding e;
  e.y_star.assign(f.decoder.mean.data(), f.decoder.mean.data() + f.decoder.mean.size());
  e.fired.assign(e.y_star.size(), true);
  const auto p = predict(f.decoder, e);
  for (std::size_t d = 0; d < p.size(); ++d) EXPECT_NEAR(p[d], f.decoder.intercept(d), 1e-12);

  auto zero = f.decoder;
  zero.regression.setZero();
  const auto any = predict(zero, train[3].encoding);
  for (std::size_t d = 0; d < any.size(); ++d) EXPECT_EQ(any[d], zero.intercept(d));

  Encoding short_enc;
  short_enc.y_star.assign(3, 0.0);
  short_enc.fired.assign(3, true);
  EXPECT_THROW(predict(f.decoder, short_enc), std::invalid_argument);
}

TEST(Score, PerfectAndReversed) {
  std::vector<ParamVector> truth{{1, 10}, {2, 20}, {3, 30}, {4, 40}};
  auto r = score_predictions(truth, truth);
  EXPECT_DOUBLE_EQ(r.kendall_mean, 1.0);
  EXPECT_NEAR(r.pearson_mean, 1.0, 1e-12);
  EXPECT_EQ(r.outlier_pct, 0.0);
  std::vector<ParamVector> rev{{4, 40}, {3, 30}, {2, 20}, {1, 10}};
  EXPECT_DOUBLE_EQ(score_predictions(truth, rev).kendall_mean, -1.0);
}

TEST(Score, HandDatasetAgainstPairCount) {
  std::vector<ParamVector> truth{{1}, {2}, {3}, {4}, {5}};
  std::vector<ParamVector> pred{{1.5}, {1.0}, {3.2}, {5.0}, {4.1}};
  // Concordant 8, discordant 2 of 10 pairs.
  EXPECT_DOUBLE_EQ(score_predictions(truth, pred).kendall_mean, 0.6);
}

TEST(Score, OutliersLeftOutOfPearson) {
  std::vector<ParamVector> truth{{1}, {2}, {3}, {4}, {5}};
  std::vector<ParamVector> pred{{1}, {2}, {3}, {4}, {50}};
  const auto r = score_predictions(truth, pred);
  EXPECT_DOUBLE_EQ(r.outlier_pct, 20.0);
  EXPECT_NEAR(r.pearson_mean, 1.0, 1e-12);
  std::vector<ParamVector> low{{0.1}, {2}, {3}, {4}, {5}};
  EXPECT_DOUBLE_EQ(score_predictions(truth, low).outlier_pct, 20.0);
}

TEST(Score, PearsonAffineInvariance) {
  std::vector<ParamVector> truth{{1}, {2}, {3}, {4}, {5}, {6}};
  std::vector<ParamVector> pred{{1.2}, {2.5}, {2.9}, {4.4}, {4.8}, {6.1}};
  std::vector<ParamVector> scaled;
  for (const auto& p : pred) scaled.push_back({1.1 * p[0] + 0.3});
  EXPECT_NEAR(score_predictions(truth, pred).pearson_mean, score_predictions(truth, scaled).pearson_mean, 1e-12);
}
