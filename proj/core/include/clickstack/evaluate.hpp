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

#ifndef CLICKSTACK_EVALUATE_HPP
#define CLICKSTACK_EVALUATE_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "clickstack/dataset.hpp"
#include "clickstack/ensemble.hpp"
#include "clickstack/feature_select.hpp"
#include "clickstack/hyperopt.hpp"
#include "clickstack/metrics.hpp"
#include "clickstack/preprocess.hpp"
#include "clickstack/regressors.hpp"

namespace clickstack {

// ---------------------------------------------------------------------------
// Configuration

struct BaseModelConfig {
  std::string name;  // variant name; defaults to the algorithm name
  RegressorSpec spec;
};

struct TuningConfig {
  int budget = 50;
  std::vector<Algorithm> algorithms{Algorithm::kGbtLevelwise,
                                    Algorithm::kGbtLeafwise,
                                    Algorithm::kSgdLinear};
  // Overrides default_search_space() per algorithm.
  std::map<Algorithm, ParamSpace> spaces;
  int n_candidates = 512;

  ParamSpace space_for(Algorithm algorithm) const;
};

struct EvaluationConfig {
  PreprocessConfig preprocess;
  // Trailing days of the first train window used to validate selection,
  // tuning and nothing else.
  int validation_days = 3;
  bool select_features = true;
  RegressorSpec selection_model{Algorithm::kGbtLevelwise,
                                {{"n_estimators", 50}},
                                0};
  TuningConfig tuning;
  std::vector<BaseModelConfig> bases = default_bases();
  std::vector<Algorithm> metas{Algorithm::kOls, Algorithm::kLasso,
                               Algorithm::kBayesianRidge,
                               Algorithm::kGbtLevelwise,
                               Algorithm::kGbtLeafwise};
  int folds = 5;
  std::optional<Date> first_test_day;  // default: the last test_days days
  int test_days = 11;
  int min_train_days = 30;
  // Re-run selection and tuning for every test day instead of freezing the
  // first window's results.
  bool refresh_daily = false;
  std::uint64_t seed = 42;

  /// Throws InvalidConfig.
  void validate() const;

  /// The ten individual regressors, one per algorithm except ols.
  static std::vector<BaseModelConfig> default_bases();
};

void to_json(nlohmann::json& j, const EvaluationConfig& cfg);
void from_json(const nlohmann::json& j, EvaluationConfig& cfg);

/// Variant names in report order before sorting: bases, average,
/// weighted_average, stack_<meta>..., blend_<meta>....
std::vector<std::string> variant_names(const EvaluationConfig& cfg);

// ---------------------------------------------------------------------------
// Stages

/// Test days are consecutive distinct dates of the table. Throws DayAbsent
/// for a first_test_day not in the table, InsufficientHistory when fewer
/// than min_train_days precede it or fewer than test_days remain.
std::vector<Date> plan_test_days(const RawTable& table,
                                 const EvaluationConfig& cfg);

/// Featurized first train window split into sub-train and validation days.
struct TuningWindow {
  Date test_day;
  Pipeline pipeline;  // fit on the sub-train rows only
  FeatureMatrix sub_train;
  FeatureMatrix validation;
};

TuningWindow make_tuning_window(const RawTable& table, Date test_day,
                                const EvaluationConfig& cfg);

struct SelectionResult {
  ImportanceRanking ranking;
  FeatureSubspace subspace;
};

/// With select_features off the subspace is every column.
SelectionResult select_features(const TuningWindow& window,
                                 const EvaluationConfig& cfg);

struct TuningResult {
  Algorithm algorithm = Algorithm::kGbtLevelwise;
  ParamSpace space;
  TrialHistory history;
  RegressorSpec best;
};

/// Bayesian optimization of every configured tuning algorithm on the
/// selected columns: fit on sub-train, score R^2 on validation.
std::vector<TuningResult> tune_models(
    const TuningWindow& window, const FeatureSubspace& subspace,
    const EvaluationConfig& cfg,
    const std::function<void(Algorithm, const Trial&, std::size_t)>& observer =
        {});

/// Builds a TuningResult from a finished trial history: the incumbent's
/// point merged into the configured base spec (the base spec itself when no
/// trial succeeded).
TuningResult finish_tuning(const EvaluationConfig& cfg, Algorithm algorithm,
                           TrialHistory history);

/// Artifacts frozen across test days.
struct FrozenArtifacts {
  FeatureSubspace subspace;
  std::vector<TuningResult> tuning;

  /// Base specs with tuned hyperparameters merged in.
  std::vector<BaseModelConfig> tuned_bases(const EvaluationConfig& cfg) const;
};

FrozenArtifacts prepare_artifacts(const RawTable& table, Date test_day,
                                  const EvaluationConfig& cfg);

/// All predictions and scores of one test day.
struct DayResult {
  Date day;
  std::vector<RowKey> keys;
  Eigen::VectorXd truth;
  std::vector<std::string> variants;
  Eigen::MatrixXd predictions;     // rows x variants; NaN where failed
  std::vector<std::string> errors;  // per variant; empty when it scored
  std::vector<double> r2;           // per variant; NaN where failed
  Eigen::VectorXd weights;          // weighted-average weights per base
  std::vector<std::string> weight_names;
  std::vector<RegressorModel> bases;  // bases that fitted successfully
  std::vector<std::string> base_names;
  std::vector<std::pair<std::string, StackModel>> ensembles;
  std::optional<Pipeline> pipeline;
};

/// Trains on every row dated before `day` and predicts the rows dated
/// `day`. Test-day targets are masked before any featurization; they are
/// read only for scoring.
DayResult evaluate_day(const RawTable& table, Date day,
                       const FrozenArtifacts& artifacts,
                       const EvaluationConfig& cfg);

// ---------------------------------------------------------------------------
// Report

struct ReportCell {
  double r2 = 0.0;
  std::string error;  // non-empty marks a failed variant

  bool ok() const noexcept { return error.empty(); }
  friend bool operator==(const ReportCell& a, const ReportCell& b) {
    // Bitwise-equal doubles, treating two NaNs as equal.
    const bool same = a.r2 == b.r2 || (std::isnan(a.r2) && std::isnan(b.r2));
    return same && a.error == b.error;
  }
};

struct VariantSummary {
  std::string variant;
  double mean_r2 = 0.0;  // NaN when the variant never scored
  int scored_days = 0;
  int failed_days = 0;
};

struct EvaluationReport {
  std::vector<std::string> test_days;
  std::vector<std::string> variants;
  std::vector<std::vector<ReportCell>> cells;  // [day][variant]
  nlohmann::json manifest = nlohmann::json::object();

  /// Throws DimensionMismatch on ragged cells.
  void validate() const;
  const ReportCell& cell(std::string_view day, std::string_view variant) const;
  /// Means over successful days, ordered by descending mean, ties by name;
  /// never-scored variants last.
  std::vector<VariantSummary> summary() const;

  friend bool operator==(const EvaluationReport&,
                         const EvaluationReport&) = default;
};

using DayCallback = std::function<void(const DayResult&)>;

/// The full rolling protocol. When `frozen` is given it replaces the
/// selection/tuning stage (and is ignored if refresh_daily is set).
EvaluationReport rolling_evaluate(const RawTable& table,
                                  const EvaluationConfig& cfg,
                                  const FrozenArtifacts* frozen = nullptr,
                                  const DayCallback& on_day = {});

enum class ReportFormat { kJson, kCsv, kMarkdown };

std::string render_report(const EvaluationReport& report, ReportFormat fmt);
/// Throws IoFailure.
void render_report(const EvaluationReport& report, ReportFormat fmt,
                   const std::filesystem::path& path);

nlohmann::json report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::json& j);

nlohmann::json artifacts_to_json(const FrozenArtifacts& artifacts);
FrozenArtifacts artifacts_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const TuningResult& result);
void from_json(const nlohmann::json& j, TuningResult& result);

}  // namespace clickstack

#endif  // CLICKSTACK_EVALUATE_HPP
