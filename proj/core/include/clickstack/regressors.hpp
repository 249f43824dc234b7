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

#ifndef CLICKSTACK_REGRESSORS_HPP
#define CLICKSTACK_REGRESSORS_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "clickstack/preprocess.hpp"

namespace clickstack {

enum class Algorithm {
  kGbtLevelwise,
  kGbtLeafwise,
  kSgdLinear,
  kLasso,
  kLassoLars,
  kRidge,
  kBayesianRidge,
  kHuber,
  kPassiveAggressive,
  kElasticNet,
  kOls,
};

std::string_view to_string(Algorithm algorithm);
/// Throws InvalidConfig for an unknown name.
Algorithm algorithm_from_string(std::string_view name);
/// All eleven algorithms in declaration order.
std::span<const Algorithm> all_algorithms();
bool is_gbt(Algorithm algorithm);

struct ParamSpec {
  std::string name;
  bool integer = false;
  double lower = 0.0;
  double upper = 0.0;
  double default_value = 0.0;
};

/// Declared hyperparameters of one algorithm; the single registry that
/// fit() validates against and hyperopt draws its bounds from.
struct AlgorithmSchema {
  Algorithm algorithm;
  std::vector<ParamSpec> params;

  const ParamSpec* find(std::string_view name) const;
};

const AlgorithmSchema& schema_for(Algorithm algorithm);

struct RegressorSpec {
  Algorithm algorithm = Algorithm::kOls;
  std::map<std::string, double> hyperparams;
  std::uint64_t seed = 0;

  /// Throws InvalidConfig for undeclared keys, out-of-bounds values, or
  /// non-integral values of integer parameters.
  void validate() const;

  /// Configured value, or the schema default.
  double param(std::string_view name) const;

  friend bool operator==(const RegressorSpec&, const RegressorSpec&) = default;
};

void to_json(nlohmann::json& j, const RegressorSpec& spec);
void from_json(const nlohmann::json& j, RegressorSpec& spec);

// ---------------------------------------------------------------------------
// Trained parameters

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // rows with x[feature] < threshold go left
  int left = -1;
  int right = -1;
  double weight = 0.0;  // leaf output before shrinkage
  double gain = 0.0;    // split gain, internal nodes only

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  friend bool operator==(const RegressionTree&,
                         const RegressionTree&) = default;
};

struct GbtModel {
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::vector<RegressionTree> trees;
  // Sum over all trees of the split gains attributed to each feature.
  Eigen::VectorXd cumulative_gain;
  // Mean squared training error after 0, 1, ..., trees.size() rounds.
  std::vector<double> training_loss;
};

struct LinearModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
};

struct RegressorModel {
  RegressorSpec spec;
  std::vector<std::string> feature_names;
  std::variant<GbtModel, LinearModel> params;
  std::vector<std::string> warnings;

  Eigen::Index n_features() const;
  const GbtModel* gbt() const { return std::get_if<GbtModel>(&params); }
  const LinearModel* linear() const {
    return std::get_if<LinearModel>(&params);
  }
};

/// Trains `spec` on X.values / X.target. Deterministic for a fixed spec.
/// Throws NonFiniteInput on NaN/inf features or labels (or a diverged
/// iterative solver), TooFewSamples on an empty matrix.
RegressorModel fit(const RegressorSpec& spec, const FeatureMatrix& X);
RegressorModel fit(const RegressorSpec& spec, const Eigen::MatrixXd& X,
                   const Eigen::VectorXd& y);

/// Throws DimensionMismatch when the column count differs from training.
Eigen::VectorXd predict(const RegressorModel& model, const Eigen::MatrixXd& X);
Eigen::VectorXd predict(const RegressorModel& model, const FeatureMatrix& X);

/// sqrt(cumulative_gain / tree_count); zero vector for a tree-less model.
Eigen::VectorXd feature_importance(const GbtModel& model);

constexpr int kModelFormatVersion = 1;
nlohmann::json model_to_json(const RegressorModel& model);
RegressorModel model_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Individual solvers, exposed for testing and benchmarks.

struct GbtParams {
  bool leafwise = false;
  int n_estimators = 100;
  double learning_rate = 0.1;
  int max_depth = 6;  // 0 = unlimited (leafwise only)
  int max_leaves = 31;
  double reg_lambda = 1.0;
  double gamma = 0.0;
  int min_samples_leaf = 1;
};

GbtModel fit_gbt(const GbtParams& params, const Eigen::MatrixXd& X,
                 const Eigen::VectorXd& y);
double predict_gbt_row(const GbtModel& model,
                       const Eigen::Ref<const Eigen::RowVectorXd>& row);

}  // namespace clickstack

#endif  // CLICKSTACK_REGRESSORS_HPP
