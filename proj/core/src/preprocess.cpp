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

#include "clickstack/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "entity_index.hpp"
#include "json_util.hpp"

namespace clickstack {

// ---------------------------------------------------------------------------
// FeatureMatrix

void FeatureMatrix::validate() const {
  if (static_cast<std::size_t>(values.cols()) != column_names.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "column_names has " + std::to_string(column_names.size()) +
                    " entries for " + std::to_string(values.cols()) +
                    " columns");
  }
  if (target.size() != values.rows() ||
      static_cast<Eigen::Index>(row_keys.size()) != values.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "target/row_keys not aligned with matrix rows");
  }
  if (!values.allFinite()) {
    throw Error(ErrorCode::kNonFiniteInput, "feature matrix has NaN/inf");
  }
}

std::optional<std::size_t> FeatureMatrix::column_index(
    std::string_view name) const {
  auto it = std::ranges::find(column_names, name);
  if (it == column_names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - column_names.begin());
}

FeatureMatrix FeatureMatrix::select_rows(
    std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  out.column_names = column_names;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
  out.target.resize(static_cast<Eigen::Index>(rows.size()));
  out.row_keys.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(r);
    out.target(static_cast<Eigen::Index>(i)) = target(r);
    out.row_keys.push_back(row_keys[rows[i]]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(
    std::span<const std::string> names) const {
  FeatureMatrix out;
  out.target = target;
  out.row_keys = row_keys;
  out.values.resize(values.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto idx = column_index(names[k]);
    if (!idx) {
      throw Error(ErrorCode::kMissingColumn, "feature '" + names[k] + "'");
    }
    out.values.col(static_cast<Eigen::Index>(k)) =
        values.col(static_cast<Eigen::Index>(*idx));
    out.column_names.push_back(names[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Imputer

Imputer Imputer::fit(const RawTable& train, double max_missing_ratio) {
  if (train.rows() == 0) {
    throw Error(ErrorCode::kEmptyTable, "cannot fit imputer on zero rows");
  }
  Imputer imp;
  const double n = static_cast<double>(train.rows());
  for (const auto& c : train.numeric) {
    double sum = 0.0;
    std::size_t seen = 0;
    for (const auto& v : c.values) {
      if (v) {
        sum += *v;
        ++seen;
      }
    }
    if ((n - double(seen)) / n > max_missing_ratio) {
      imp.dropped_.push_back(c.name);
      continue;
    }
    if (seen == 0) throw Error(ErrorCode::kAllMissingColumn, c.name);
    imp.means_[c.name] = sum / double(seen);
  }
  for (const auto& c : train.categorical) {
    std::map<std::string, std::size_t> counts;
    std::size_t seen = 0;
    for (const auto& v : c.values) {
      if (v) {
        ++counts[*v];
        ++seen;
      }
    }
    if ((n - double(seen)) / n > max_missing_ratio) {
      imp.dropped_.push_back(c.name);
      continue;
    }
    if (seen == 0) throw Error(ErrorCode::kAllMissingColumn, c.name);
    // Ties go to the lexicographically smallest value.
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    imp.modes_[c.name] = best->first;
  }
  return imp;
}

RawTable Imputer::apply(const RawTable& table) const {
  const std::set<std::string> dropped(dropped_.begin(), dropped_.end());
  RawTable out;
  out.entity_ids = table.entity_ids;
  out.dates = table.dates;
  out.target = table.target;
  out.target_name = table.target_name;
  for (const auto& c : table.numeric) {
    if (dropped.contains(c.name)) continue;
    auto it = means_.find(c.name);
    if (it == means_.end()) {
      throw Error(ErrorCode::kMissingColumn,
                  "imputer was not fitted on column '" + c.name + "'");
    }
    NumericColumn col = c;
    for (auto& v : col.values) {
      if (!v) v = it->second;
    }
    out.numeric.push_back(std::move(col));
  }
  for (const auto& c : table.categorical) {
    if (dropped.contains(c.name)) continue;
    auto it = modes_.find(c.name);
    if (it == modes_.end()) {
      throw Error(ErrorCode::kMissingColumn,
                  "imputer was not fitted on column '" + c.name + "'");
    }
    CategoricalColumn col = c;
    for (auto& v : col.values) {
      if (!v) v = it->second;
    }
    out.categorical.push_back(std::move(col));
  }
  return out;
}

nlohmann::json Imputer::to_json() const {
  return {{"dropped", dropped_}, {"means", means_}, {"modes", modes_}};
}

Imputer Imputer::from_json(const nlohmann::json& j) {
  Imputer imp;
  imp.dropped_ = j.at("dropped").get<std::vector<std::string>>();
  imp.means_ = j.at("means").get<std::map<std::string, double>>();
  imp.modes_ = j.at("modes").get<std::map<std::string, std::string>>();
  return imp;
}

RawTable impute(const RawTable& table, double max_missing_ratio) {
  return Imputer::fit(table, max_missing_ratio).apply(table);
}

// ---------------------------------------------------------------------------
// Sliding windows

RawTable window_features(const RawTable& table, const WindowOptions& options) {
  if (options.horizons.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "window horizons must be non-empty");
  }
  for (int h : options.horizons) {
    if (h <= 0) {
      throw Error(ErrorCode::kInvalidConfig, "window horizons must be positive");
    }
  }
  const std::size_t n = table.rows();
  const auto groups = detail::rows_by_entity(table);

  struct Source {
    const std::string* name;
    const std::vector<std::optional<double>>* values;
  };
  std::vector<Source> sources;
  for (const auto& c : table.numeric) sources.push_back({&c.name, &c.values});
  if (options.include_target) {
    sources.push_back({&table.target_name, &table.target});
  }

  RawTable out = table;
  const std::size_t n_h = options.horizons.size();

  // Lookback start (inclusive) per row and horizon; the end is the row's own
  // position within its entity group (exclusive).
  std::vector<std::vector<std::size_t>> start(n_h, std::vector<std::size_t>(n));
  std::vector<std::size_t> position(n);
  std::vector<const std::vector<std::size_t>*> group_of(n);
  for (const auto& rows : groups) {
    for (std::size_t k = 0; k < n_h; ++k) {
      const int h = options.horizons[k];
      std::size_t lo = 0;
      for (std::size_t pos = 0; pos < rows.size(); ++pos) {
        const Date t = table.dates[rows[pos]];
        while (lo < pos && table.dates[rows[lo]] < t - h) ++lo;
        start[k][rows[pos]] = lo;
      }
    }
    for (std::size_t pos = 0; pos < rows.size(); ++pos) {
      position[rows[pos]] = pos;
      group_of[rows[pos]] = &rows;
    }
  }

  for (const auto& src : sources) {
    for (std::size_t k = 0; k < n_h; ++k) {
      const std::string suffix = "_" + std::to_string(options.horizons[k]);
      NumericColumn mean_col{*src.name + "_mean" + suffix,
                             std::vector<std::optional<double>>(n)};
      NumericColumn std_col{*src.name + "_std" + suffix,
                            std::vector<std::optional<double>>(n)};
      for (std::size_t row = 0; row < n; ++row) {
        const auto& rows = *group_of[row];
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t q = start[k][row]; q < position[row]; ++q) {
          if (const auto& v = (*src.values)[rows[q]]) {
            sum += *v;
            ++count;
          }
        }
        if (count == 0) {
          mean_col.values[row] = 0.0;
          std_col.values[row] = 0.0;
          continue;
        }
        const double mean = sum / double(count);
        double ss = 0.0;
        for (std::size_t q = start[k][row]; q < position[row]; ++q) {
          if (const auto& v = (*src.values)[rows[q]]) {
            ss += (*v - mean) * (*v - mean);
          }
        }
        mean_col.values[row] = mean;
        std_col.values[row] = std::sqrt(ss / double(count));
      }
      out.numeric.push_back(std::move(mean_col));
      out.numeric.push_back(std::move(std_col));
    }
  }
  for (std::size_t k = 0; k < n_h; ++k) {
    NumericColumn flag{"lookback_empty_" + std::to_string(options.horizons[k]),
                       std::vector<std::optional<double>>(n)};
    for (std::size_t row = 0; row < n; ++row) {
      flag.values[row] = start[k][row] == position[row] ? 1.0 : 0.0;
    }
    out.numeric.push_back(std::move(flag));
  }
  return out;
}

// ---------------------------------------------------------------------------
// One-hot

OneHotEncoder OneHotEncoder::fit(const RawTable& train, int max_cardinality) {
  if (max_cardinality <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "max_cardinality must be positive");
  }
  OneHotEncoder enc;
  for (const auto& c : train.categorical) {
    std::set<std::string> values;
    for (const auto& v : c.values) {
      if (v) values.insert(*v);
    }
    if (values.size() > static_cast<std::size_t>(max_cardinality)) {
      enc.dropped_.push_back(c.name);
      continue;
    }
    enc.vocab_[c.name] = {values.begin(), values.end()};
  }
  return enc;
}

FeatureMatrix OneHotEncoder::encode(const RawTable& table) const {
  const auto n = static_cast<Eigen::Index>(table.rows());
  std::size_t width = table.numeric.size();
  std::vector<const CategoricalColumn*> kept;
  for (const auto& c : table.categorical) {
    auto it = vocab_.find(c.name);
    if (it == vocab_.end()) continue;  // dropped or unknown
    kept.push_back(&c);
    width += it->second.size() + 1;
  }

  FeatureMatrix m;
  m.values.setZero(n, static_cast<Eigen::Index>(width));
  m.column_names.reserve(width);
  Eigen::Index col = 0;
  for (const auto& c : table.numeric) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& v = c.values[static_cast<std::size_t>(i)];
      if (!v) {
        throw Error(ErrorCode::kNonFiniteInput,
                    "missing value in '" + c.name + "'; impute first");
      }
      m.values(i, col) = *v;
    }
    m.column_names.push_back(c.name);
    ++col;
  }
  for (const auto* c : kept) {
    const auto& vocab = vocab_.at(c->name);
    for (const auto& value : vocab) m.column_names.push_back(c->name + "=" + value);
    m.column_names.push_back(c->name + "=" + kOther);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& v = c->values[static_cast<std::size_t>(i)];
      auto it = v ? std::ranges::lower_bound(vocab, *v) : vocab.end();
      const bool known = v && it != vocab.end() && *it == *v;
      const auto offset =
          known ? static_cast<Eigen::Index>(it - vocab.begin())
                : static_cast<Eigen::Index>(vocab.size());
      m.values(i, col + offset) = 1.0;
    }
    col += static_cast<Eigen::Index>(vocab.size() + 1);
  }

  m.target.resize(n);
  m.row_keys.reserve(table.rows());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& t = table.target[static_cast<std::size_t>(i)];
    m.target(i) = t ? *t : std::numeric_limits<double>::quiet_NaN();
    m.row_keys.push_back({table.entity_ids[static_cast<std::size_t>(i)],
                          table.dates[static_cast<std::size_t>(i)]});
  }
  return m;
}

nlohmann::json OneHotEncoder::to_json() const {
  return {{"vocabularies", vocab_}, {"dropped", dropped_}};
}

OneHotEncoder OneHotEncoder::from_json(const nlohmann::json& j) {
  OneHotEncoder enc;
  enc.vocab_ =
      j.at("vocabularies").get<std::map<std::string, std::vector<std::string>>>();
  enc.dropped_ = j.at("dropped").get<std::vector<std::string>>();
  return enc;
}

FeatureMatrix encode_onehot(const RawTable& table, int max_cardinality) {
  return OneHotEncoder::fit(table, max_cardinality).encode(table);
}

// ---------------------------------------------------------------------------
// Scaler

Scaler Scaler::fit(const FeatureMatrix& train) {
  if (train.rows() == 0) {
    throw Error(ErrorCode::kEmptyTable, "cannot fit scaler on zero rows");
  }
  Scaler s;
  s.min_ = train.values.colwise().minCoeff().transpose();
  s.max_ = train.values.colwise().maxCoeff().transpose();
  return s;
}

FeatureMatrix Scaler::apply(const FeatureMatrix& m) const {
  if (m.cols() != min_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "scaler fitted on " + std::to_string(min_.size()) +
                    " columns, got " + std::to_string(m.cols()));
  }
  FeatureMatrix out = m;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double range = max_(c) - min_(c);
    if (range <= 0.0) {
      out.values.col(c).setZero();
      continue;
    }
    out.values.col(c) = ((m.values.col(c).array() - min_(c)) / range)
                            .max(0.0)
                            .min(1.0)
                            .matrix();
  }
  return out;
}

nlohmann::json Scaler::to_json() const {
  return {{"min", detail::to_json_array(min_)},
          {"max", detail::to_json_array(max_)}};
}

Scaler Scaler::from_json(const nlohmann::json& j) {
  Scaler s;
  s.min_ = detail::vector_from_json(j.at("min"));
  s.max_ = detail::vector_from_json(j.at("max"));
  if (s.min_.size() != s.max_.size()) {
    throw Error(ErrorCode::kParseError, "scaler min/max length mismatch");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Pipeline

void PreprocessConfig::validate() const {
  if (!(max_missing_ratio >= 0.0 && max_missing_ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "max_missing_ratio must be in [0,1]");
  }
  if (window.horizons.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "horizons must be non-empty");
  }
  for (int h : window.horizons) {
    if (h <= 0) throw Error(ErrorCode::kInvalidConfig, "horizons must be > 0");
  }
  if (decompose.period <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "seasonal_period must be > 0");
  }
  if (decompose.window < 2 * decompose.period) {
    throw Error(ErrorCode::kInvalidConfig,
                "decompose_window must be >= 2 * seasonal_period");
  }
  if (max_cardinality <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "max_cardinality must be > 0");
  }
}

void to_json(nlohmann::json& j, const PreprocessConfig& cfg) {
  j = nlohmann::json{{"max_missing_ratio", cfg.max_missing_ratio},
                     {"horizons", cfg.window.horizons},
                     {"window_target", cfg.window.include_target},
                     {"seasonal_period", cfg.decompose.period},
                     {"decompose_window", cfg.decompose.window},
                     {"decompose_columns", cfg.decompose.columns},
                     {"max_cardinality", cfg.max_cardinality}};
}

void from_json(const nlohmann::json& j, PreprocessConfig& cfg) {
  detail::require_object(j, "preprocess",
                         {"max_missing_ratio", "horizons", "window_target",
                          "seasonal_period", "decompose_window",
                          "decompose_columns", "max_cardinality"});
  PreprocessConfig out;
  try {
    out.max_missing_ratio = j.value("max_missing_ratio", out.max_missing_ratio);
    out.window.horizons = j.value("horizons", out.window.horizons);
    out.window.include_target =
        j.value("window_target", out.window.include_target);
    out.decompose.period = j.value("seasonal_period", out.decompose.period);
    out.decompose.window = j.value("decompose_window", out.decompose.window);
    out.decompose.columns =
        j.value("decompose_columns", out.decompose.columns);
    out.max_cardinality = j.value("max_cardinality", out.max_cardinality);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("preprocess: ") + e.what());
  }
  out.validate();
  cfg = std::move(out);
}

RawTable Pipeline::expand(const RawTable& imputed) const {
  return decomposition_features(window_features(imputed, config_.window),
                                config_.decompose);
}

Pipeline Pipeline::fit(const RawTable& train, const PreprocessConfig& config) {
  config.validate();
  Pipeline p;
  p.config_ = config;
  p.imputer_ = Imputer::fit(train, config.max_missing_ratio);
  const RawTable expanded = p.expand(p.imputer_.apply(train));
  p.encoder_ = OneHotEncoder::fit(expanded, config.max_cardinality);
  const FeatureMatrix encoded = p.encoder_.encode(expanded);
  p.scaler_ = Scaler::fit(encoded);
  p.columns_ = encoded.column_names;
  return p;
}

FeatureMatrix Pipeline::transform(const RawTable& table) const {
  FeatureMatrix encoded = encoder_.encode(expand(imputer_.apply(table)));
  if (encoded.column_names != columns_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "transformed columns differ from the fitted pipeline");
  }
  FeatureMatrix out = scaler_.apply(encoded);
  out.validate();
  return out;
}

nlohmann::json Pipeline::to_json() const {
  nlohmann::json cfg;
  clickstack::to_json(cfg, config_);
  return {{"format", "clickstack.pipeline"},
          {"version", kFormatVersion},
          {"config", cfg},
          {"imputer", imputer_.to_json()},
          {"encoder", encoder_.to_json()},
          {"scaler", scaler_.to_json()},
          {"columns", columns_}};
}

Pipeline Pipeline::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "clickstack.pipeline" ||
      j.value("version", 0) != kFormatVersion) {
    throw Error(ErrorCode::kParseError, "not a version-1 clickstack pipeline");
  }
  Pipeline p;
  p.config_ = j.at("config").get<PreprocessConfig>();
  p.imputer_ = Imputer::from_json(j.at("imputer"));
  p.encoder_ = OneHotEncoder::from_json(j.at("encoder"));
  p.scaler_ = Scaler::from_json(j.at("scaler"));
  p.columns_ = j.at("columns").get<std::vector<std::string>>();
  return p;
}

}  // namespace clickstack
