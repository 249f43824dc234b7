// Copyright 2026 The clickstack Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================


#include <random>

#include <gtest/gtest.h>

#include "clickstack/regressors.hpp"
#include "linear.hpp"
#include "oracles.hpp"

namespace clickstack {
namespace {

using testing::random_vector;
using testing::well_conditioned;

TEST(RidgeTest, ClosedFormMatchesGradientDescent) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> alpha_dist(0.01, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd X = well_conditioned(rng, 20, 5);
    const Eigen::VectorXd y = random_vector(rng, 20) * 3.0 + 1.0 * X.col(0);
    const double alpha = alpha_dist(rng);
    const auto closed = detail::fit_ridge(X, y, alpha);
    const auto oracle = testing::ridge_gradient_descent(X, y, alpha);
    EXPECT_LT((closed.weights - oracle.weights).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(closed.intercept, oracle.intercept, 1e-6);
  }
}

TEST(LassoTest, ZeroPenaltyMatchesOls) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd X = well_conditioned(rng, 20, 5);
    const Eigen::VectorXd y = random_vector(rng, 20);
    const auto lasso = detail::fit_elastic_net(X, y, 0.0, 1.0, 100000, 1e-12);
    const auto ols = detail::fit_ols(X, y);
    EXPECT_LT((lasso.weights - ols.weights).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(lasso.intercept, ols.intercept, 1e-6);
  }
}

TEST(OlsTest, RecoversNoiselessCoefficients) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd X = well_conditioned(rng, 20, 5);
    const Eigen::VectorXd w = random_vector(rng, 5);
    const double b = random_vector(rng, 1)(0);
    const Eigen::VectorXd y = (X * w).array() + b;
    const auto fit = detail::fit_ols(X, y);
    EXPECT_LT((fit.weights - w).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(fit.intercept, b, 1e-8);
  }
}

TEST(OlsTest, TwoFeatureExample) {
  Eigen::MatrixXd X(6, 2);
  X << 0, 1, 1, 0, 2, 3, 3, 1, 4, 4, 5, 2;
  const Eigen::VectorXd y = 2.0 * X.col(0) - 3.0 * X.col(1) +
                            Eigen::VectorXd::Ones(6);
  const auto model = fit({Algorithm::kOls, {}, 0}, X, y);
  EXPECT_NEAR(model.linear()->weights(0), 2.0, 1e-8);
  EXPECT_NEAR(model.linear()->weights(1), -3.0, 1e-8);
  EXPECT_NEAR(model.linear()->intercept, 1.0, 1e-8);
}

double critical_penalty(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  return (Xc.transpose() * yc).cwiseAbs().maxCoeff() /
         static_cast<double>(X.rows());
}

TEST(LassoTest, CriticalPenaltyZeroesAllWeights) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd X = testing::random_matrix(rng, 30, 6);
    const Eigen::VectorXd y = X * random_vector(rng, 6) + random_vector(rng, 30);
    const double lambda_max = critical_penalty(X, y);
    for (double factor : {1.0, 1.5, 10.0}) {
      const auto m = fit({Algorithm::kLasso, {{"alpha", lambda_max * factor}}, 0},
                         X, y);
      EXPECT_TRUE((m.linear()->weights.array() == 0.0).all()) << factor;
      EXPECT_NEAR(m.linear()->intercept, y.mean(), 1e-12);
    }
    const auto below =
        fit({Algorithm::kLasso, {{"alpha", lambda_max * 0.9}}, 0}, X, y);
    EXPECT_GT(below.linear()->weights.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(LassoTest, LarsPathAgreesWithCoordinateDescent) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd X = well_conditioned(rng, 40, 5);
    const Eigen::VectorXd y = X * random_vector(rng, 5) + 0.3 * random_vector(rng, 40);
    const double alpha = 0.2 * critical_penalty(X, y);
    const auto lars = detail::fit_lasso_lars(X, y, alpha, 500);
    const auto cd = detail::fit_elastic_net(X, y, alpha, 1.0, 100000, 1e-14);
    EXPECT_LT((lars.weights - cd.weights).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(lars.intercept, cd.intercept, 1e-6);
  }
}

TEST(ElasticNetTest, SatisfiesOptimalityConditions) {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd X = well_conditioned(rng, 50, 4);
  const Eigen::VectorXd y = X * random_vector(rng, 4) + random_vector(rng, 50);
  const double alpha = 0.1, l1_ratio = 0.5;
  const auto f = detail::fit_elastic_net(X, y, alpha, l1_ratio, 100000, 1e-14);
  const Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
  const Eigen::VectorXd r = (y.array() - y.mean()).matrix() - Xc * f.weights;
  const double n = 50.0;
  for (Eigen::Index j = 0; j < 4; ++j) {
    const double g = Xc.col(j).dot(r) / n - alpha * (1 - l1_ratio) * f.weights(j);
    if (f.weights(j) != 0.0) {
      EXPECT_NEAR(g, alpha * l1_ratio * (f.weights(j) > 0 ? 1 : -1), 1e-6);
    } else {
      EXPECT_LE(std::abs(g), alpha * l1_ratio + 1e-9);
    }
  }
}

TEST(BayesianRidgeTest, ShrinksTowardZeroComparedToOls) {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd X = well_conditioned(rng, 25, 5);
  const Eigen::VectorXd y = X * random_vector(rng, 5) + 2.0 * random_vector(rng, 25);
  const auto br = detail::fit_bayesian_ridge(X, y, {});
  const auto ols = detail::fit_ols(X, y);
  EXPECT_LT(br.weights.norm(), ols.weights.norm());
  EXPECT_GT(br.noise_precision, 0.0);
  EXPECT_GT(br.weight_precision, 0.0);
}

TEST(HuberTest, IgnoresGrossOutlier) {
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd X = well_conditioned(rng, 40, 2);
  Eigen::VectorXd y = 1.5 * X.col(0) - 0.5 * X.col(1) + 0.01 * random_vector(rng, 40);
  y(3) += 500.0;
  const auto huber = detail::fit_huber(X, y, 1.35, 0.0, 200, 1e-10);
  const auto ols = detail::fit_ols(X, y);
  EXPECT_NEAR(huber.weights(0), 1.5, 0.05);
  EXPECT_NEAR(huber.weights(1), -0.5, 0.05);
  EXPECT_GT(std::abs(ols.weights(0) - 1.5), std::abs(huber.weights(0) - 1.5));
}

TEST(SgdTest, ApproachesLeastSquaresOnScaledData) {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd X =
      (testing::random_matrix(rng, 400, 3).array() * 0.3 + 0.5).matrix();
  const Eigen::VectorXd y = X * Eigen::Vector3d(2.0, -1.0, 0.5) +
                            0.05 * random_vector(rng, 400);
  detail::SgdOptions opt;
  opt.eta0 = 0.1;
  opt.n_epochs = 200;
  opt.alpha = 0.0;
  const auto sgd = detail::fit_sgd(X, y, opt, 1);
  const auto ols = detail::fit_ols(X, y);
  EXPECT_LT((sgd.weights - ols.weights).cwiseAbs().maxCoeff(), 0.1);
}

TEST(PassiveAggressiveTest, FitsLinearSignal) {
  std::mt19937_64 rng(10);
  const Eigen::MatrixXd X = testing::random_matrix(rng, 300, 2);
  const Eigen::VectorXd y = 3.0 * X.col(0) + X.col(1);
  const auto pa = detail::fit_passive_aggressive(X, y, 1.0, 0.01, 50, 3);
  EXPECT_NEAR(pa.weights(0), 3.0, 0.1);
  EXPECT_NEAR(pa.weights(1), 1.0, 0.1);
}

}  // namespace
}  // namespace clickstack
