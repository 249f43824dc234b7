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

#ifndef CLICKSTACK_FEATURE_SELECT_HPP
#define CLICKSTACK_FEATURE_SELECT_HPP

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "clickstack/preprocess.hpp"
#include "clickstack/regressors.hpp"

namespace clickstack {

struct RankedFeature {
  std::string name;
  double importance = 0.0;
  std::size_t column = 0;  // index in the matrix that was ranked
};

/// Features by descending importance; equal scores keep ascending column
/// order.
struct ImportanceRanking {
  std::vector<RankedFeature> entries;

  std::vector<std::string> prefix(std::size_t length) const;
  std::size_t size() const noexcept { return entries.size(); }
};

ImportanceRanking make_ranking(const std::vector<std::string>& names,
                               const Eigen::VectorXd& importance);

/// Fits `gbt_spec` once on `train` and ranks every column by its gain
/// importance. Throws InvalidConfig for a non-GBT spec.
ImportanceRanking rank_features(const FeatureMatrix& train,
                                const RegressorSpec& gbt_spec);

struct FeatureSubspace {
  std::vector<std::string> features;
  double validation_r2 = 0.0;
  int iterations = 0;
  // The first prefix already scored below zero; it is returned anyway since
  // an empty feature set cannot be modelled.
  bool below_zero_at_first = false;
};

void to_json(nlohmann::json& j, const FeatureSubspace& s);
void from_json(const nlohmann::json& j, FeatureSubspace& s);

/// Recursive elimination over ranking prefixes of length 1, 2, ...: each
/// prefix is scored by a fresh GBT fit on `train` and R^2 on `validation`.
/// The first time a prefix scores below the best-so-far running score
/// (initially 0), the previous prefix is returned. Without any drop the
/// whole ranking is returned.
FeatureSubspace recursive_eliminate(const FeatureMatrix& train,
                                    const FeatureMatrix& validation,
                                    const ImportanceRanking& ranking,
                                    const RegressorSpec& gbt_spec);

}  // namespace clickstack

#endif  // CLICKSTACK_FEATURE_SELECT_HPP
