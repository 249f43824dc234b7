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


#include <random>

#include <gtest/gtest.h>

#include "clickstack/feature_select.hpp"
#include "oracles.hpp"

namespace clickstack {
namespace {

using testing::selection_instance;
using testing::small_gbt;

TEST(RankingTest, SortsDescendingWithIndexTieBreak) {
  const ImportanceRanking r =
      make_ranking({"a", "b", "c", "d"}, Eigen::Vector4d(1.0, 3.0, 1.0, 2.0));
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r.prefix(4), (std::vector<std::string>{"b", "d", "a", "c"}));
  EXPECT_EQ(r.entries[2].column, 0u);
  EXPECT_EQ(r.entries[3].column, 2u);
  EXPECT_EQ(r.prefix(1), std::vector<std::string>{"b"});
}

TEST(RankingTest, InformativeColumnRankedFirst) {
  std::mt19937_64 rng(30);
  const auto inst = selection_instance(rng, 1, 3);
  const ImportanceRanking r = rank_features(inst.train, small_gbt());
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r.entries[0].name, "x0");
}

TEST(RankingTest, SingleColumnRanking) {
  std::mt19937_64 rng(31);
  const auto inst = selection_instance(rng, 1, 0);
  EXPECT_EQ(rank_features(inst.train, small_gbt()).size(), 1u);
}

TEST(RankingTest, RequiresTreeModel) {
  std::mt19937_64 rng(32);
  const auto inst = selection_instance(rng, 1, 1);
  EXPECT_THROW(rank_features(inst.train, {Algorithm::kRidge, {}, 0}), Error);
}

TEST(EliminateTest, SingleFeatureRankingReturnsIt) {
  std::mt19937_64 rng(33);
  const auto inst = selection_instance(rng, 1, 0);
  const auto r = rank_features(inst.train, small_gbt());
  const FeatureSubspace s =
      recursive_eliminate(inst.train, inst.validation, r, small_gbt());
  EXPECT_EQ(s.features, std::vector<std::string>{"x0"});
  EXPECT_EQ(s.iterations, 1);
}

TEST(EliminateTest, MatchesBruteForcePrefixSearch) {
  std::mt19937_64 rng(34);
  std::uniform_int_distribution<int> count(1, 4);
  for (int trial = 0; trial < 30; ++trial) {
    const int informative = count(rng);
    const int noise = std::uniform_int_distribution<int>(0, 8 - informative)(rng);
    const auto inst = selection_instance(rng, informative, noise, 80);
    const auto ranking = rank_features(inst.train, small_gbt());
    const auto got =
        recursive_eliminate(inst.train, inst.validation, ranking, small_gbt());
    const auto want = testing::brute_force_prefix(inst.train, inst.validation,
                                                  ranking, small_gbt());
    EXPECT_EQ(got.features, want.features) << "trial " << trial;
    EXPECT_DOUBLE_EQ(got.validation_r2, want.validation_r2);
    EXPECT_EQ(got.iterations, want.iterations);
    EXPECT_EQ(got.below_zero_at_first, want.below_zero_at_first);
  }
}

TEST(EliminateTest, StopsAfterInformativeBlock) {
  // Noise columns are appended to the ranking by hand so that the
  // validation curve peaks at the informative prefix.
  std::mt19937_64 rng(35);
  const auto inst = selection_instance(rng, 4, 4, 400);
  const ImportanceRanking ranking = make_ranking(
      {"x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7"},
      (Eigen::VectorXd(8) << 8, 7, 6, 5, 4, 3, 2, 1).finished());
  const RegressorSpec spec{Algorithm::kGbtLevelwise,
                           {{"n_estimators", 60}, {"max_depth", 3}}, 0};
  const auto got =
      recursive_eliminate(inst.train, inst.validation, ranking, spec);
  const auto want =
      testing::brute_force_prefix(inst.train, inst.validation, ranking, spec);
  EXPECT_EQ(got.features, want.features);
  EXPECT_EQ(got.features,
            (std::vector<std::string>{"x0", "x1", "x2", "x3"}));
}

TEST(EliminateTest, MonotoneImprovementKeepsEverything) {
  std::mt19937_64 rng(36);
  const auto inst = selection_instance(rng, 4, 0, 400);
  const ImportanceRanking ranking = make_ranking(
      {"x0", "x1", "x2", "x3"}, Eigen::Vector4d(4, 3, 2, 1));
  const RegressorSpec spec{Algorithm::kGbtLevelwise,
                           {{"n_estimators", 60}, {"max_depth", 3}}, 0};
  const auto got =
      recursive_eliminate(inst.train, inst.validation, ranking, spec);
  EXPECT_EQ(got.features.size(), 4u);
  EXPECT_EQ(got.iterations, 4);
}

TEST(SubspaceJsonTest, RoundTrip) {
  FeatureSubspace s{{"a", "b"}, 0.25, 3, false};
  const FeatureSubspace back = nlohmann::json(s).get<FeatureSubspace>();
  EXPECT_EQ(back.features, s.features);
  EXPECT_EQ(back.validation_r2, s.validation_r2);
  EXPECT_EQ(back.iterations, s.iterations);
}

}  // namespace
}  // namespace clickstack
