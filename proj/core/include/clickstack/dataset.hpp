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

#ifndef CLICKSTACK_DATASET_HPP
#define CLICKSTACK_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clickstack/common.hpp"

namespace clickstack {

struct NumericColumn {
  std::string name;
  std::vector<std::optional<double>> values;
  friend bool operator==(const NumericColumn&, const NumericColumn&) = default;
};

struct CategoricalColumn {
  std::string name;
  std::vector<std::optional<std::string>> values;
  friend bool operator==(const CategoricalColumn&,
                         const CategoricalColumn&) = default;
};

/// Time-indexed tabular records stored column-wise. Row i is
/// (entity_ids[i], dates[i], numeric[*].values[i], categorical[*].values[i],
/// target[i]). Every column vector has rows() entries.
struct RawTable {
  std::vector<std::string> entity_ids;
  std::vector<Date> dates;
  std::vector<NumericColumn> numeric;
  std::vector<CategoricalColumn> categorical;
  std::vector<std::optional<double>> target;
  std::string target_name = "clicks";

  std::size_t rows() const noexcept { return dates.size(); }

  /// Throws on ragged columns, duplicate (entity, date) keys, or a
  /// negative/non-finite target.
  void validate() const;

  const NumericColumn* find_numeric(std::string_view name) const;
  const CategoricalColumn* find_categorical(std::string_view name) const;

  std::size_t missing_cells() const;

  /// Sorted unique dates.
  std::vector<Date> distinct_dates() const;

  RawTable select_rows(std::span<const std::size_t> rows) const;

  /// Rows reordered by (entity_id, date).
  RawTable sorted_by_entity_date() const;

  friend bool operator==(const RawTable&, const RawTable&) = default;
};

/// Column roles for CSV input. Columns not named as entity/date/target and
/// not listed in categorical_columns are parsed as numeric.
struct TableSchema {
  std::string entity_column = "entity_id";
  std::string date_column = "date";
  std::string target_column = "clicks";
  std::vector<std::string> categorical_columns;
};

struct LoadDiagnostics {
  // Rows whose target cell was empty or unparseable.
  std::size_t dropped_unlabeled_rows = 0;
  std::size_t missing_cells = 0;
};

RawTable load_table(const std::filesystem::path& path,
                    const TableSchema& schema,
                    LoadDiagnostics* diagnostics = nullptr);

/// Writes entity, date, numeric columns, categorical columns, target.
/// Missing cells are written as empty strings; reals use the shortest
/// representation that round-trips.
void write_table(const RawTable& table, const std::filesystem::path& path);

struct SyntheticConfig {
  int n_entities = 20;
  int n_days = 120;
  int seasonal_period = 7;
  double seasonal_amplitude = 8.0;
  double trend_slope = 0.05;
  double noise_std = 8.0;
  // Multiplier on the informative columns' coefficients; 0 removes their
  // influence on the target.
  double feature_effect_scale = 1.0;
  double missing_rate = 0.02;
  int n_noise_features = 4;
  std::uint64_t seed = 42;
  std::string start_date = "2020-01-01";
  // When false the generator skips flooring and rounding, leaving the
  // latent linear signal untouched.
  bool integer_counts = true;

  void validate() const;
  friend bool operator==(const SyntheticConfig&,
                         const SyntheticConfig&) = default;
};

void to_json(nlohmann::json& j, const SyntheticConfig& cfg);
void from_json(const nlohmann::json& j, SyntheticConfig& cfg);

/// Names of the numeric columns the generator's target depends on linearly.
std::vector<std::string> synthetic_informative_columns();
/// Categorical columns emitted by the generator.
std::vector<std::string> synthetic_categorical_columns();
/// Schema matching write_table(generate_synthetic(cfg)).
TableSchema synthetic_schema();

RawTable generate_synthetic(const SyntheticConfig& cfg);

struct ChronoSplit {
  RawTable train;
  RawTable test;
  Date test_day;
};

ChronoSplit chronological_split(const RawTable& table, Date test_day);

}  // namespace clickstack

#endif  // CLICKSTACK_DATASET_HPP
