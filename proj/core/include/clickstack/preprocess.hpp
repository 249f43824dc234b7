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

#ifndef CLICKSTACK_PREPROCESS_HPP
#define CLICKSTACK_PREPROCESS_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "clickstack/dataset.hpp"

namespace clickstack {

struct RowKey {
  std::string entity_id;
  Date date;
  friend bool operator==(const RowKey&, const RowKey&) = default;
};

/// Dense model input. Rows align with row_keys and target; columns align
/// with column_names. target holds NaN for rows whose label is unknown
/// (e.g. the day being predicted).
struct FeatureMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> column_names;
  Eigen::VectorXd target;
  std::vector<RowKey> row_keys;

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index cols() const noexcept { return values.cols(); }

  /// Throws DimensionMismatch on shape disagreement, NonFiniteInput on a
  /// NaN/inf feature value.
  void validate() const;

  std::optional<std::size_t> column_index(std::string_view name) const;

  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  /// Throws MissingColumn for an unknown name.
  FeatureMatrix select_columns(std::span<const std::string> names) const;
};

// ---------------------------------------------------------------------------
// Imputation

/// Column means (numeric) and modes (categorical) learned from training
/// rows. Columns missing more than max_missing_ratio of their cells are
/// dropped.
class Imputer {
 public:
  static Imputer fit(const RawTable& train, double max_missing_ratio = 0.5);
  RawTable apply(const RawTable& table) const;

  const std::vector<std::string>& dropped_columns() const { return dropped_; }
  const std::map<std::string, double>& means() const { return means_; }
  const std::map<std::string, std::string>& modes() const { return modes_; }

  nlohmann::json to_json() const;
  static Imputer from_json(const nlohmann::json& j);

 private:
  std::vector<std::string> dropped_;
  std::map<std::string, double> means_;
  std::map<std::string, std::string> modes_;
};

/// Fits an Imputer on `table` and applies it to the same rows.
RawTable impute(const RawTable& table, double max_missing_ratio = 0.5);

// ---------------------------------------------------------------------------
// Sliding-window features

struct WindowOptions {
  std::vector<int> horizons{3, 7, 30};
  // Also window the target history (always strictly before the row's day).
  bool include_target = false;
};

/// Appends `<c>_mean_<h>` and `<c>_std_<h>` for every numeric column and
/// horizon, computed per entity over the h calendar days strictly before
/// each row. An empty lookback yields 0 for both and sets
/// `lookback_empty_<h>` to 1.
RawTable window_features(const RawTable& table, const WindowOptions& options);

// ---------------------------------------------------------------------------
// Seasonal decomposition

struct Decomposition {
  std::vector<double> trend;
  std::vector<double> seasonal;
  std::vector<double> residual;
  int period = 0;
  // Trend is a genuine moving average on [first_interior, last_interior);
  // outside it the nearest defined value is repeated.
  std::size_t first_interior = 0;
  std::size_t last_interior = 0;
};

/// Additive moving-average decomposition. Requires series.size() >=
/// 2 * period, otherwise throws SeriesTooShort.
Decomposition seasonal_decompose(std::span<const double> series, int period);

struct DecomposeOptions {
  // Numeric column names, or the table's target name. Empty means target.
  std::vector<std::string> columns;
  int period = 7;
  // Trailing history length fed to each decomposition.
  int window = 28;
};

/// Per row, decomposes the entity's trailing history of each configured
/// column (days strictly before the row) and appends `<c>_trend` (last
/// trend value), `<c>_seasonal` (seasonal profile at the row's phase) and
/// `<c>_resid` (last residual). Rows with fewer than 2*period history
/// points get zeros and `<c>_decomp_empty` = 1.
RawTable decomposition_features(const RawTable& table,
                                const DecomposeOptions& options);

// ---------------------------------------------------------------------------
// One-hot encoding

class OneHotEncoder {
 public:
  static constexpr const char* kOther = "__other__";

  /// Columns whose training vocabulary exceeds max_cardinality are dropped.
  static OneHotEncoder fit(const RawTable& train, int max_cardinality);

  /// Numeric columns pass through; each kept categorical column becomes one
  /// indicator per training value plus an `__other__` indicator. Missing
  /// numeric cells are rejected (impute first).
  FeatureMatrix encode(const RawTable& table) const;

  const std::map<std::string, std::vector<std::string>>& vocabularies() const {
    return vocab_;
  }
  const std::vector<std::string>& dropped_columns() const { return dropped_; }

  nlohmann::json to_json() const;
  static OneHotEncoder from_json(const nlohmann::json& j);

 private:
  std::map<std::string, std::vector<std::string>> vocab_;
  std::vector<std::string> dropped_;
};

FeatureMatrix encode_onehot(const RawTable& table, int max_cardinality);

// ---------------------------------------------------------------------------
// Min-max scaling

class Scaler {
 public:
  static Scaler fit(const FeatureMatrix& train);
  /// (x - min) / (max - min) clipped to [0, 1]; constant columns map to 0.
  FeatureMatrix apply(const FeatureMatrix& m) const;

  const Eigen::VectorXd& mins() const { return min_; }
  const Eigen::VectorXd& maxs() const { return max_; }

  nlohmann::json to_json() const;
  static Scaler from_json(const nlohmann::json& j);

 private:
  Eigen::VectorXd min_;
  Eigen::VectorXd max_;
};

inline Scaler scale_fit(const FeatureMatrix& train) {
  return Scaler::fit(train);
}
inline FeatureMatrix scale_apply(const Scaler& scaler, const FeatureMatrix& m) {
  return scaler.apply(m);
}

// ---------------------------------------------------------------------------
// Full pipeline

struct PreprocessConfig {
  double max_missing_ratio = 0.5;
  WindowOptions window{{3, 7, 30}, true};
  DecomposeOptions decompose{};
  int max_cardinality = 64;

  void validate() const;
};

void to_json(nlohmann::json& j, const PreprocessConfig& cfg);
void from_json(const nlohmann::json& j, PreprocessConfig& cfg);

/// impute -> window features -> decomposition features -> one-hot -> scale.
/// Every statistic is learned from the rows passed to fit(); transform()
/// never reads a row's own target, only targets of strictly earlier days.
class Pipeline {
 public:
  static constexpr int kFormatVersion = 1;

  static Pipeline fit(const RawTable& train, const PreprocessConfig& config);

  /// Featurizes every row of `table`. Window and decomposition features of a
  /// row read only rows of the same entity dated strictly earlier, so the
  /// table may include rows whose target is unknown.
  FeatureMatrix transform(const RawTable& table) const;

  const PreprocessConfig& config() const { return config_; }
  const std::vector<std::string>& feature_names() const { return columns_; }

  nlohmann::json to_json() const;
  static Pipeline from_json(const nlohmann::json& j);

 private:
  RawTable expand(const RawTable& imputed) const;

  PreprocessConfig config_;
  Imputer imputer_;
  OneHotEncoder encoder_;
  Scaler scaler_;
  std::vector<std::string> columns_;
};

}  // namespace clickstack

#endif  // CLICKSTACK_PREPROCESS_HPP
