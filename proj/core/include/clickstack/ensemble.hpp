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

#ifndef CLICKSTACK_ENSEMBLE_HPP
#define CLICKSTACK_ENSEMBLE_HPP

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "clickstack/preprocess.hpp"
#include "clickstack/regressors.hpp"

namespace clickstack {

/// One column of predictions per base model, rows aligned with the scored
/// matrix.
struct PredictionMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> model_names;  // optional; empty or one per column

  Eigen::Index models() const noexcept { return values.cols(); }
  /// Throws NonFiniteInput for a NaN/inf entry, DimensionMismatch when the
  /// names do not match the column count.
  void validate() const;
};

/// Rowwise mean. Throws TooFewModels below two columns.
Eigen::VectorXd ensemble_average(const PredictionMatrix& preds);

/// Clamps scores below at 1e-6 and divides by their sum, so the result is
/// elementwise positive and sums to 1. Throws TooFewModels below two scores.
Eigen::VectorXd normalize_weights(const Eigen::VectorXd& base_scores);

/// Rowwise sum of w_r * p_r. Throws DimensionMismatch when the weight
/// count differs from the column count.
Eigen::VectorXd ensemble_weighted(const PredictionMatrix& preds,
                                  const Eigen::VectorXd& weights);

enum class StackMode { kStack, kBlend };

std::string_view to_string(StackMode mode);

/// ols, lasso, bayesian_ridge, gbt_levelwise and gbt_leafwise.
bool is_meta_algorithm(Algorithm algorithm);

/// Base models refit on the whole train window together with their
/// out-of-sample predictions on the train rows. The train rows are cut into
/// folds + 1 chronological chunks; fold k fits on chunks [0, k) and predicts
/// chunk k, so the first chunk never receives a level-0 prediction.
struct Level0 {
  std::vector<RegressorModel> bases;
  Eigen::MatrixXd oof_predictions;  // oof_rows.size() x bases.size()
  std::vector<Eigen::Index> oof_rows;

  /// Pooled R^2 of each base's out-of-sample predictions.
  Eigen::VectorXd oof_scores(const Eigen::VectorXd& train_target) const;
};

/// Chunks are contiguous runs of distinct row_keys dates, so rows sharing a
/// date stay together. Throws TooFewSamples when there are fewer distinct
/// days than folds + 1. `full_fits`, when non-empty, supplies the bases
/// already fitted on all of `train` (same order as base_specs).
Level0 fit_level0(const std::vector<RegressorSpec>& base_specs,
                  const FeatureMatrix& train, int folds = 5,
                  std::vector<RegressorModel> full_fits = {});

struct StackModel {
  StackMode mode = StackMode::kStack;
  std::vector<RegressorModel> bases;
  RegressorModel meta;
  std::vector<std::string> reduced_features;  // blend only
  std::vector<std::string> input_columns;     // base training columns

  Eigen::Index meta_width() const;
};

/// Fits the meta model on `level0`'s out-of-sample predictions (plus the
/// reduced feature columns in blend mode). Throws InvalidConfig for a meta
/// algorithm outside the allowed set or an unknown reduced feature, before
/// fitting anything.
StackModel fit_meta(const Level0& level0, const RegressorSpec& meta_spec,
                    const FeatureMatrix& train, StackMode mode,
                    const std::vector<std::string>& reduced_features = {});

StackModel stack_fit(const std::vector<RegressorSpec>& base_specs,
                     const RegressorSpec& meta_spec, const FeatureMatrix& train,
                     int folds = 5);

StackModel blend_fit(const std::vector<RegressorSpec>& base_specs,
                     const RegressorSpec& meta_spec, const FeatureMatrix& train,
                     const std::vector<std::string>& reduced_features,
                     int folds = 5);

/// Base predictions on X, one column per base.
PredictionMatrix base_predictions(const std::vector<RegressorModel>& bases,
                                  const FeatureMatrix& X);

/// Throws DimensionMismatch when X's columns differ from the training
/// columns.
Eigen::VectorXd stack_predict(const StackModel& model, const FeatureMatrix& X);

/// Meta prediction from precomputed base predictions on X.
Eigen::VectorXd stack_predict(const StackModel& model, const FeatureMatrix& X,
                              const PredictionMatrix& base_preds);

}  // namespace clickstack

#endif  // CLICKSTACK_ENSEMBLE_HPP
