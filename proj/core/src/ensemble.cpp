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

#include "clickstack/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "clickstack/metrics.hpp"

namespace clickstack {

namespace {

constexpr double kWeightFloor = 1e-6;

void require_models(Eigen::Index n) {
  if (n < 2) {
    throw Error(ErrorCode::kTooFewModels,
                "an ensemble needs at least two models, got " +
                    std::to_string(n));
  }
}

// Chronological chunk index of every row.
std::vector<int> chunk_of_rows(const FeatureMatrix& train, int chunks) {
  std::set<Date> unique;
  for (const auto& key : train.row_keys) unique.insert(key.date);
  const std::vector<Date> days(unique.begin(), unique.end());
  if (static_cast<int>(days.size()) < chunks) {
    throw Error(ErrorCode::kTooFewSamples,
                "forward chaining needs " + std::to_string(chunks) +
                    " distinct days, train window has " +
                    std::to_string(days.size()));
  }
  // Day i lands in chunk floor(i * chunks / n_days): contiguous, sizes
  // differing by at most one.
  std::vector<int> out(train.row_keys.size());
  for (std::size_t r = 0; r < out.size(); ++r) {
    const auto pos = static_cast<std::size_t>(
        std::ranges::lower_bound(days, train.row_keys[r].date) - days.begin());
    out[r] = static_cast<int>(pos * static_cast<std::size_t>(chunks) /
                              days.size());
  }
  return out;
}

std::vector<std::size_t> rows_where(const std::vector<int>& chunk,
                                    auto&& predicate) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < chunk.size(); ++r) {
    if (predicate(chunk[r])) rows.push_back(r);
  }
  return rows;
}

void check_meta(const RegressorSpec& meta_spec) {
  if (!is_meta_algorithm(meta_spec.algorithm)) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string(to_string(meta_spec.algorithm)) +
                    " is not an allowed meta regressor (use ols, lasso, "
                    "bayesian_ridge, gbt_levelwise or gbt_leafwise)");
  }
  meta_spec.validate();
}

void check_reduced(const FeatureMatrix& train,
                   const std::vector<std::string>& reduced) {
  for (const auto& name : reduced) {
    if (!train.column_index(name)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "reduced feature '" + name + "' is not a train column");
    }
  }
}

std::vector<std::string> meta_columns(const std::vector<RegressorModel>& bases,
                                      const std::vector<std::string>& reduced) {
  std::vector<std::string> names;
  for (std::size_t b = 0; b < bases.size(); ++b) {
    names.push_back("pred_" + std::to_string(b) + "_" +
                    std::string(to_string(bases[b].spec.algorithm)));
  }
  names.insert(names.end(), reduced.begin(), reduced.end());
  return names;
}

Eigen::MatrixXd meta_input(const Eigen::MatrixXd& base_preds,
                           const FeatureMatrix& rows,
                           const std::vector<std::string>& reduced) {
  Eigen::MatrixXd out(base_preds.rows(),
                      base_preds.cols() + static_cast<Eigen::Index>(reduced.size()));
  out.leftCols(base_preds.cols()) = base_preds;
  for (std::size_t k = 0; k < reduced.size(); ++k) {
    const auto idx = rows.column_index(reduced[k]);
    if (!idx) {
      throw Error(ErrorCode::kMissingColumn, "feature '" + reduced[k] + "'");
    }
    out.col(base_preds.cols() + static_cast<Eigen::Index>(k)) =
        rows.values.col(static_cast<Eigen::Index>(*idx));
  }
  return out;
}

}  // namespace

void PredictionMatrix::validate() const {
  if (!model_names.empty() &&
      static_cast<Eigen::Index>(model_names.size()) != values.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "model_names does not match the prediction column count");
  }
  if (!values.allFinite()) {
    throw Error(ErrorCode::kNonFiniteInput, "prediction matrix has NaN/inf");
  }
}

Eigen::VectorXd ensemble_average(const PredictionMatrix& preds) {
  require_models(preds.models());
  preds.validate();
  return preds.values.rowwise().mean();
}

Eigen::VectorXd normalize_weights(const Eigen::VectorXd& base_scores) {
  require_models(base_scores.size());
  Eigen::VectorXd w = base_scores;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    // NaN and -inf scores collapse to the floor as well.
    if (!(w(i) >= kWeightFloor)) w(i) = kWeightFloor;
    if (!std::isfinite(w(i))) w(i) = kWeightFloor;
  }
  return w / w.sum();
}

Eigen::VectorXd ensemble_weighted(const PredictionMatrix& preds,
                                  const Eigen::VectorXd& weights) {
  if (weights.size() != preds.models()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(weights.size()) + " weights for " +
                    std::to_string(preds.models()) + " models");
  }
  preds.validate();
  return preds.values * weights;
}

std::string_view to_string(StackMode mode) {
  return mode == StackMode::kBlend ? "blend" : "stack";
}

bool is_meta_algorithm(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kOls:
    case Algorithm::kLasso:
    case Algorithm::kBayesianRidge:
    case Algorithm::kGbtLevelwise:
    case Algorithm::kGbtLeafwise:
      return true;
    default:
      return false;
  }
}

Eigen::VectorXd Level0::oof_scores(const Eigen::VectorXd& train_target) const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(oof_rows.size()));
  for (std::size_t i = 0; i < oof_rows.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = train_target(oof_rows[i]);
  }
  Eigen::VectorXd scores(oof_predictions.cols());
  for (Eigen::Index b = 0; b < scores.size(); ++b) {
    scores(b) = r2_score(y, oof_predictions.col(b)).r2;
  }
  return scores;
}

Level0 fit_level0(const std::vector<RegressorSpec>& base_specs,
                  const FeatureMatrix& train, int folds,
                  std::vector<RegressorModel> full_fits) {
  if (base_specs.empty()) {
    throw Error(ErrorCode::kTooFewModels, "no base models configured");
  }
  if (folds < 1) {
    throw Error(ErrorCode::kInvalidConfig, "folds must be >= 1");
  }
  for (const auto& spec : base_specs) spec.validate();
  train.validate();

  const std::vector<int> chunk = chunk_of_rows(train, folds + 1);
  Level0 out;
  for (std::size_t r = 0; r < chunk.size(); ++r) {
    if (chunk[r] > 0) out.oof_rows.push_back(static_cast<Eigen::Index>(r));
  }
  out.oof_predictions.resize(static_cast<Eigen::Index>(out.oof_rows.size()),
                             static_cast<Eigen::Index>(base_specs.size()));

  // Position of each train row inside oof_rows.
  std::vector<Eigen::Index> slot(chunk.size(), -1);
  for (std::size_t i = 0; i < out.oof_rows.size(); ++i) {
    slot[static_cast<std::size_t>(out.oof_rows[i])] =
        static_cast<Eigen::Index>(i);
  }

  for (int k = 1; k <= folds; ++k) {
    const auto fit_rows = rows_where(chunk, [k](int c) { return c < k; });
    const auto pred_rows = rows_where(chunk, [k](int c) { return c == k; });
    const FeatureMatrix fit_part = train.select_rows(fit_rows);
    const FeatureMatrix pred_part = train.select_rows(pred_rows);
    for (std::size_t b = 0; b < base_specs.size(); ++b) {
      const Eigen::VectorXd p = predict(fit(base_specs[b], fit_part), pred_part);
      for (std::size_t i = 0; i < pred_rows.size(); ++i) {
        out.oof_predictions(slot[pred_rows[i]], static_cast<Eigen::Index>(b)) =
            p(static_cast<Eigen::Index>(i));
      }
    }
  }
  if (full_fits.empty()) {
    for (const auto& spec : base_specs) out.bases.push_back(fit(spec, train));
  } else {
    if (full_fits.size() != base_specs.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "prefit base count differs from the spec count");
    }
    out.bases = std::move(full_fits);
  }
  return out;
}

Eigen::Index StackModel::meta_width() const {
  return static_cast<Eigen::Index>(bases.size() + reduced_features.size());
}

StackModel fit_meta(const Level0& level0, const RegressorSpec& meta_spec,
                    const FeatureMatrix& train, StackMode mode,
                    const std::vector<std::string>& reduced_features) {
  check_meta(meta_spec);
  const std::vector<std::string> reduced =
      mode == StackMode::kBlend ? reduced_features : std::vector<std::string>{};
  check_reduced(train, reduced);
  if (level0.oof_predictions.cols() !=
      static_cast<Eigen::Index>(level0.bases.size())) {
    throw Error(ErrorCode::kDimensionMismatch,
                "level-0 predictions do not match the base count");
  }

  std::vector<std::size_t> rows(level0.oof_rows.begin(), level0.oof_rows.end());
  const FeatureMatrix meta_rows = train.select_rows(rows);

  FeatureMatrix meta_train;
  meta_train.values = meta_input(level0.oof_predictions, meta_rows, reduced);
  meta_train.column_names = meta_columns(level0.bases, reduced);
  meta_train.target = meta_rows.target;
  meta_train.row_keys = meta_rows.row_keys;

  StackModel model;
  model.mode = mode;
  model.bases = level0.bases;
  model.meta = fit(meta_spec, meta_train);
  model.reduced_features = reduced;
  model.input_columns = train.column_names;
  return model;
}

StackModel stack_fit(const std::vector<RegressorSpec>& base_specs,
                     const RegressorSpec& meta_spec, const FeatureMatrix& train,
                     int folds) {
  check_meta(meta_spec);
  return fit_meta(fit_level0(base_specs, train, folds), meta_spec, train,
                  StackMode::kStack);
}

StackModel blend_fit(const std::vector<RegressorSpec>& base_specs,
                     const RegressorSpec& meta_spec, const FeatureMatrix& train,
                     const std::vector<std::string>& reduced_features,
                     int folds) {
  check_meta(meta_spec);
  check_reduced(train, reduced_features);
  return fit_meta(fit_level0(base_specs, train, folds), meta_spec, train,
                  StackMode::kBlend, reduced_features);
}

PredictionMatrix base_predictions(const std::vector<RegressorModel>& bases,
                                  const FeatureMatrix& X) {
  PredictionMatrix out;
  out.values.resize(X.rows(), static_cast<Eigen::Index>(bases.size()));
  for (std::size_t b = 0; b < bases.size(); ++b) {
    out.values.col(static_cast<Eigen::Index>(b)) = predict(bases[b], X);
    out.model_names.emplace_back(to_string(bases[b].spec.algorithm));
  }
  return out;
}

Eigen::VectorXd stack_predict(const StackModel& model, const FeatureMatrix& X,
                              const PredictionMatrix& base_preds) {
  if (X.column_names != model.input_columns) {
    throw Error(ErrorCode::kDimensionMismatch,
                "input columns differ from the ensemble's training columns");
  }
  if (base_preds.models() != static_cast<Eigen::Index>(model.bases.size()) ||
      base_preds.values.rows() != X.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "base predictions do not match the ensemble");
  }
  return predict(model.meta,
                 meta_input(base_preds.values, X, model.reduced_features));
}

Eigen::VectorXd stack_predict(const StackModel& model, const FeatureMatrix& X) {
  if (X.column_names != model.input_columns) {
    throw Error(ErrorCode::kDimensionMismatch,
                "input columns differ from the ensemble's training columns");
  }
  return stack_predict(model, X, base_predictions(model.bases, X));
}

}  // namespace clickstack
