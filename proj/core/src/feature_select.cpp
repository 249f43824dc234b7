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

#include "clickstack/feature_select.hpp"

#include <algorithm>
#include <numeric>

#include "clickstack/metrics.hpp"

namespace clickstack {

std::vector<std::string> ImportanceRanking::prefix(std::size_t length) const {
  std::vector<std::string> out;
  out.reserve(std::min(length, entries.size()));
  for (std::size_t i = 0; i < length && i < entries.size(); ++i) {
    out.push_back(entries[i].name);
  }
  return out;
}

ImportanceRanking make_ranking(const std::vector<std::string>& names,
                               const Eigen::VectorXd& importance) {
  if (static_cast<Eigen::Index>(names.size()) != importance.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "importance vector does not match column names");
  }
  ImportanceRanking ranking;
  for (std::size_t i = 0; i < names.size(); ++i) {
    ranking.entries.push_back(
        {names[i], importance(static_cast<Eigen::Index>(i)), i});
  }
  std::ranges::stable_sort(ranking.entries,
                           [](const RankedFeature& a, const RankedFeature& b) {
                             return a.importance > b.importance;
                           });
  return ranking;
}

ImportanceRanking rank_features(const FeatureMatrix& train,
                                const RegressorSpec& gbt_spec) {
  if (!is_gbt(gbt_spec.algorithm)) {
    throw Error(ErrorCode::kInvalidConfig,
                "feature ranking needs a GBT spec, got " +
                    std::string(to_string(gbt_spec.algorithm)));
  }
  const RegressorModel model = fit(gbt_spec, train);
  return make_ranking(train.column_names, feature_importance(*model.gbt()));
}

void to_json(nlohmann::json& j, const FeatureSubspace& s) {
  j = nlohmann::json{{"features", s.features},
                     {"validation_r2", s.validation_r2},
                     {"iterations", s.iterations},
                     {"below_zero_at_first", s.below_zero_at_first}};
}

void from_json(const nlohmann::json& j, FeatureSubspace& s) {
  s.features = j.at("features").get<std::vector<std::string>>();
  s.validation_r2 = j.at("validation_r2").get<double>();
  s.iterations = j.at("iterations").get<int>();
  s.below_zero_at_first = j.value("below_zero_at_first", false);
  if (s.features.empty()) {
    throw Error(ErrorCode::kParseError, "feature subspace is empty");
  }
}

FeatureSubspace recursive_eliminate(const FeatureMatrix& train,
                                    const FeatureMatrix& validation,
                                    const ImportanceRanking& ranking,
                                    const RegressorSpec& gbt_spec) {
  if (!is_gbt(gbt_spec.algorithm)) {
    throw Error(ErrorCode::kInvalidConfig,
                "recursive elimination needs a GBT spec");
  }
  if (ranking.size() == 0) {
    throw Error(ErrorCode::kInvalidConfig, "empty importance ranking");
  }

  FeatureSubspace result;
  double running = 0.0;
  for (std::size_t length = 1; length <= ranking.size(); ++length) {
    const auto names = ranking.prefix(length);
    const RegressorModel model = fit(gbt_spec, train.select_columns(names));
    const Eigen::VectorXd pred =
        predict(model, validation.select_columns(names));
    const double score = r2_score(validation.target, pred).r2;
    result.iterations = static_cast<int>(length);

    if (score < running) {
      if (length == 1) {
        result.features = names;
        result.validation_r2 = score;
        result.below_zero_at_first = true;
      } else {
        result.features = ranking.prefix(length - 1);
        result.validation_r2 = running;
      }
      return result;
    }
    running = score;
    result.features = names;
    result.validation_r2 = score;
  }
  return result;
}

}  // namespace clickstack
