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

#ifndef CLICKSTACK_SRC_LINEAR_HPP
#define CLICKSTACK_SRC_LINEAR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "clickstack/common.hpp"

// Linear-family solvers. All fit an unpenalized intercept by centering X and
// y (Huber uses weighted centering) and return weights in the original
// feature space.
namespace clickstack::detail {

struct LinearFit {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  std::vector<std::string> warnings;
  // Bayesian ridge only.
  double noise_precision = 0.0;
  double weight_precision = 0.0;
};

LinearFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Closed form (X'X + alpha I)^-1 X'y via Cholesky.
LinearFit fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    double alpha);

/// Cyclic coordinate descent on
///   1/(2n) ||y - Xw||^2 + alpha*l1_ratio ||w||_1
///     + alpha*(1 - l1_ratio)/2 ||w||^2,
/// stopped on a duality gap below tol * ||y||^2.
LinearFit fit_elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          double alpha, double l1_ratio, int max_iter,
                          double tol);

/// Least-angle regression with the lasso modification, followed until the
/// maximal absolute correlation (scaled by 1/n) reaches alpha.
LinearFit fit_lasso_lars(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         double alpha, int max_iter);

struct BayesianRidgeOptions {
  int max_iter = 300;
  double tol = 1e-6;
  double alpha_1 = 1e-6;
  double alpha_2 = 1e-6;
  double lambda_1 = 1e-6;
  double lambda_2 = 1e-6;
};

/// Evidence maximization over noise and weight precisions.
LinearFit fit_bayesian_ridge(const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y,
                             const BayesianRidgeOptions& options);

/// Iteratively reweighted least squares for the Huber loss. Residuals are
/// measured against a robust scale (1.4826 * median |r|).
LinearFit fit_huber(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    double epsilon, double alpha, int max_iter, double tol);

struct SgdOptions {
  double eta0 = 0.01;
  double power_t = 0.25;
  double alpha = 1e-4;
  int n_epochs = 50;
  int batch_size = 32;
};

/// Mini-batch SGD on squared loss with eta_t = eta0 / t^power_t.
LinearFit fit_sgd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const SgdOptions& options, std::uint64_t seed);

/// PA-I regression with the epsilon-insensitive loss.
LinearFit fit_passive_aggressive(const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& y, double C,
                                 double epsilon, int n_epochs,
                                 std::uint64_t seed);

}  // namespace clickstack::detail

#endif  // CLICKSTACK_SRC_LINEAR_HPP
