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
#include <set>

#include <gtest/gtest.h>

#include "clickstack/ensemble.hpp"
#include "clickstack/metrics.hpp"
#include "oracles.hpp"

namespace clickstack {
namespace {

using testing::make_matrix;
using testing::random_matrix;
using testing::random_vector;

PredictionMatrix preds(std::initializer_list<std::initializer_list<double>> rows) {
  PredictionMatrix p;
  p.values.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) p.values(i, j++) = v;
    ++i;
  }
  return p;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kEmptyTable;
}

// ---------------------------------------------------------------------------
// Average and weighted average

TEST(AverageTest, HandValues) {
  EXPECT_EQ(ensemble_average(preds({{1, 3}}))(0), 2.0);
  EXPECT_EQ(ensemble_average(preds({{1, 2, 6}}))(0), 3.0);
  const auto same = preds({{4, 4, 4}, {-1.5, -1.5, -1.5}});
  EXPECT_EQ(ensemble_average(same), same.values.col(0));
}

TEST(AverageTest, NeedsTwoModels) {
  EXPECT_EQ(code_of([] { ensemble_average(preds({{1}})); }),
            ErrorCode::kTooFewModels);
}

TEST(NormalizeWeightsTest, HandValues) {
  const Eigen::VectorXd w = normalize_weights(Eigen::Vector2d(0.6, 0.2));
  EXPECT_NEAR(w(0), 0.75, 1e-12);
  EXPECT_NEAR(w(1), 0.25, 1e-12);
  const Eigen::VectorXd third = normalize_weights(Eigen::Vector3d(0.5, 0.5, 0.5));
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(third(k), 1.0 / 3.0, 1e-12);
}

TEST(NormalizeWeightsTest, NegativeScoreIsClampedBeforeNormalizing) {
  const Eigen::VectorXd w = normalize_weights(Eigen::Vector2d(0.5, -0.012));
  EXPECT_NEAR(w(0), 0.5 / 0.500001, 1e-12);
  EXPECT_NEAR(w(1), 1e-6 / 0.500001, 1e-12);
  EXPECT_NEAR(w(0), 0.999998, 1e-6);
  EXPECT_NEAR(w.sum(), 1.0, 1e-12);
}

TEST(NormalizeWeightsTest, AlwaysPositiveAndSumToOne) {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd s = random_vector(rng, 2 + trial % 9) * 2.0;
    const Eigen::VectorXd w = normalize_weights(s);
    EXPECT_NEAR(w.sum(), 1.0, 1e-12);
    EXPECT_TRUE((w.array() > 0.0).all());
  }
  const Eigen::VectorXd all_negative =
      normalize_weights(Eigen::Vector3d(-1.0, -2.0, -0.5));
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(all_negative(k), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(code_of([] { normalize_weights(Eigen::VectorXd::Ones(1)); }),
            ErrorCode::kTooFewModels);
}

TEST(WeightedTest, HandValues) {
  EXPECT_NEAR(ensemble_weighted(preds({{4, 8}}), Eigen::Vector2d(0.75, 0.25))(0),
              5.0, 1e-12);
}

TEST(WeightedTest, UniformWeightsReduceToAverage) {
  std::mt19937_64 rng(51);
  PredictionMatrix p;
  p.values = random_matrix(rng, 30, 4);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(4, 0.25);
  EXPECT_LT((ensemble_weighted(p, w) - ensemble_average(p)).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(WeightedTest, OneHotWeightSelectsModel) {
  std::mt19937_64 rng(52);
  PredictionMatrix p;
  p.values = random_matrix(rng, 30, 3);
  EXPECT_EQ(ensemble_weighted(p, Eigen::Vector3d(0, 1, 0)), p.values.col(1));
}

TEST(WeightedTest, CountMismatchIsRejected) {
  EXPECT_EQ(code_of([] {
              ensemble_weighted(preds({{1, 2, 3}}), Eigen::Vector2d(0.5, 0.5));
            }),
            ErrorCode::kDimensionMismatch);
}

TEST(PredictionMatrixTest, NonFiniteEntryIsRejected) {
  auto p = preds({{1, std::nan("")}});
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::kNonFiniteInput);
}

// ---------------------------------------------------------------------------
// Stacking and blending

const RegressorSpec kOls{Algorithm::kOls, {}, 0};

FeatureMatrix linear_days(std::uint64_t seed, int days = 24, int per_day = 5,
                          double noise = 0.0) {
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd X = random_matrix(rng, days * per_day, 3);
  const Eigen::VectorXd y = 2.0 * X.col(0) - X.col(1) + 0.5 * X.col(2) +
                            noise * random_vector(rng, days * per_day);
  return make_matrix(X, y, per_day);
}

TEST(StackTest, MetaLearnsIdentityOverPerfectBase) {
  const FeatureMatrix train = linear_days(60);
  const StackModel m = stack_fit({kOls}, kOls, train);
  EXPECT_NEAR(r2_score(train.target, stack_predict(m, train)).r2, 1.0, 1e-6);
  EXPECT_NEAR(m.meta.linear()->weights(0), 1.0, 1e-6);
  const Eigen::VectorXd base = predict(m.bases[0], train);
  EXPECT_LT((stack_predict(m, train) - base).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(StackTest, ExactBaseDominatesMetaWeights) {
  const FeatureMatrix train = linear_days(61);
  const RegressorSpec weak{Algorithm::kGbtLevelwise,
                           {{"n_estimators", 5}, {"max_depth", 2}}, 0};
  const StackModel m = stack_fit({kOls, weak}, kOls, train);
  const Eigen::VectorXd& w = m.meta.linear()->weights;
  EXPECT_GE(std::abs(w(0)), 10.0 * std::abs(w(1)));
}

TEST(StackTest, DisallowedMetaIsRejectedBeforeFitting) {
  const FeatureMatrix train = linear_days(62);
  EXPECT_EQ(code_of([&] {
              stack_fit({kOls}, {Algorithm::kHuber, {}, 0}, train);
            }),
            ErrorCode::kInvalidConfig);
  for (Algorithm a : all_algorithms()) {
    const bool allowed = a == Algorithm::kOls || a == Algorithm::kLasso ||
                         a == Algorithm::kBayesianRidge ||
                         a == Algorithm::kGbtLevelwise ||
                         a == Algorithm::kGbtLeafwise;
    EXPECT_EQ(is_meta_algorithm(a), allowed) << to_string(a);
  }
}

TEST(StackTest, PredictChecksColumns) {
  const FeatureMatrix train = linear_days(63);
  const StackModel m = stack_fit({kOls, {Algorithm::kRidge, {}, 0}}, kOls, train);
  const std::vector<std::string> two{"x0", "x1"};
  EXPECT_EQ(code_of([&] { stack_predict(m, train.select_columns(two)); }),
            ErrorCode::kDimensionMismatch);
}

TEST(BlendTest, NoReducedFeaturesEqualsStack) {
  const FeatureMatrix train = linear_days(64, 24, 5, 0.5);
  const std::vector<RegressorSpec> bases{kOls, {Algorithm::kRidge, {}, 0}};
  const RegressorSpec meta{Algorithm::kBayesianRidge, {}, 0};
  const StackModel s = stack_fit(bases, meta, train);
  const StackModel b = blend_fit(bases, meta, train, {});
  EXPECT_EQ(stack_predict(s, train), stack_predict(b, train));
  EXPECT_EQ(b.meta_width(), 2);
}

TEST(BlendTest, AbsentReducedFeatureIsAConfigError) {
  const FeatureMatrix train = linear_days(65);
  EXPECT_EQ(code_of([&] { blend_fit({kOls}, kOls, train, {"x0", "nope"}); }),
            ErrorCode::kInvalidConfig);
}

TEST(BlendTest, ZeroBasesReduceToFeatureBlock) {
  const FeatureMatrix train = linear_days(66, 24, 5, 0.3);
  RegressorModel zero;
  zero.spec = kOls;
  zero.feature_names = train.column_names;
  zero.params = LinearModel{Eigen::VectorXd::Zero(3), 0.0};

  Level0 level0 = fit_level0({kOls}, train, 5, {zero});
  level0.oof_predictions.setZero();
  const std::vector<std::string> reduced{"x0", "x2"};
  const RegressorSpec meta{Algorithm::kBayesianRidge, {}, 0};
  const StackModel blend =
      fit_meta(level0, meta, train, StackMode::kBlend, reduced);

  std::vector<std::size_t> rows(level0.oof_rows.begin(), level0.oof_rows.end());
  const FeatureMatrix meta_rows =
      train.select_rows(rows).select_columns(reduced);
  const RegressorModel alone = fit(meta, meta_rows);
  const double r2_blend =
      r2_score(meta_rows.target, stack_predict(blend, train.select_rows(rows)))
          .r2;
  const double r2_alone = r2_score(meta_rows.target, predict(alone, meta_rows)).r2;
  EXPECT_NEAR(r2_blend, r2_alone, 1e-9);
}

// ---------------------------------------------------------------------------
// Level-0 fitting

TEST(Level0Test, OutOfFoldPredictionsUseOnlyEarlierDays) {
  const FeatureMatrix train = linear_days(67, 18, 4, 1.0);
  const RegressorSpec spec{Algorithm::kGbtLevelwise, {{"n_estimators", 10}}, 0};
  const int folds = 5;
  const Level0 l0 = fit_level0({spec, kOls}, train, folds);

  // Recompute the chronological chunks from the row dates.
  std::vector<Date> days;
  for (const auto& k : train.row_keys) days.push_back(k.date);
  std::ranges::sort(days);
  days.erase(std::unique(days.begin(), days.end()), days.end());
  const auto chunk_of = [&](Date d) {
    const auto pos = std::ranges::lower_bound(days, d) - days.begin();
    return static_cast<int>(pos * (folds + 1) / static_cast<long>(days.size()));
  };

  std::set<Eigen::Index> covered(l0.oof_rows.begin(), l0.oof_rows.end());
  for (Eigen::Index r = 0; r < train.rows(); ++r) {
    EXPECT_EQ(covered.contains(r), chunk_of(train.row_keys[r].date) > 0);
  }
  for (int k = 1; k <= folds; ++k) {
    std::vector<std::size_t> fit_rows, pred_rows;
    for (Eigen::Index r = 0; r < train.rows(); ++r) {
      const int c = chunk_of(train.row_keys[r].date);
      if (c < k) fit_rows.push_back(static_cast<std::size_t>(r));
      if (c == k) pred_rows.push_back(static_cast<std::size_t>(r));
    }
    const auto model = fit(spec, train.select_rows(fit_rows));
    const Eigen::VectorXd want = predict(model, train.select_rows(pred_rows));
    for (std::size_t i = 0; i < pred_rows.size(); ++i) {
      const auto slot = std::ranges::find(l0.oof_rows,
                                          static_cast<Eigen::Index>(pred_rows[i])) -
                        l0.oof_rows.begin();
      EXPECT_EQ(l0.oof_predictions(slot, 0), want(static_cast<Eigen::Index>(i)));
    }
  }
}

TEST(Level0Test, FutureTargetsDoNotChangeEarlierPredictions) {
  FeatureMatrix train = linear_days(68, 18, 4, 1.0);
  const Level0 a = fit_level0({kOls}, train, 5);
  // Perturb only the last chunk's targets: those rows are predicted but
  // never used for fitting any fold.
  const Date last = train.row_keys.back().date;
  for (Eigen::Index r = 0; r < train.rows(); ++r) {
    if (train.row_keys[r].date >= last - 2) train.target(r) += 100.0;
  }
  const Level0 b = fit_level0({kOls}, train, 5);
  EXPECT_EQ(a.oof_predictions, b.oof_predictions);
}

TEST(Level0Test, TooFewDaysIsRejected) {
  const FeatureMatrix train = linear_days(69, 5, 4);
  EXPECT_EQ(code_of([&] { fit_level0({kOls}, train, 5); }),
            ErrorCode::kTooFewSamples);
}

TEST(Level0Test, ScoresArePooledR2) {
  const FeatureMatrix train = linear_days(70, 24, 5, 0.2);
  const Level0 l0 = fit_level0({kOls, {Algorithm::kLasso, {{"alpha", 100.0}}, 0}},
                               train, 5);
  const Eigen::VectorXd s = l0.oof_scores(train.target);
  Eigen::VectorXd y(static_cast<Eigen::Index>(l0.oof_rows.size()));
  for (std::size_t i = 0; i < l0.oof_rows.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = train.target(l0.oof_rows[i]);
  }
  EXPECT_DOUBLE_EQ(s(0), r2_score(y, l0.oof_predictions.col(0)).r2);
  EXPECT_GT(s(0), 0.9);
  EXPECT_LT(s(1), 0.1);
}

}  // namespace
}  // namespace clickstack
