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


#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "clickstack/hyperopt.hpp"

namespace clickstack {
namespace {

ParamSpace unit_line() {
  return {{{"x", ParamKind::kContinuous, 0.0, 1.0, ParamScale::kLinear}}};
}

ParamSpace unit_square() {
  return {{{"x", ParamKind::kContinuous, 0.0, 1.0, ParamScale::kLinear},
           {"y", ParamKind::kContinuous, 0.0, 1.0, ParamScale::kLinear}}};
}

double median(std::vector<double> v) {
  std::ranges::sort(v);
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

TEST(ParamSpaceTest, DegenerateSpacesAreRejected) {
  auto code_of = [](const ParamSpace& s) {
    try {
      s.validate();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kEmptyTable;
  };
  EXPECT_EQ(code_of(ParamSpace{}), ErrorCode::kDegenerateSpace);
  EXPECT_EQ(code_of({{{"x", ParamKind::kContinuous, 1.0, 1.0, ParamScale::kLinear}}}),
            ErrorCode::kDegenerateSpace);
  EXPECT_EQ(code_of({{{"x", ParamKind::kContinuous, 0.0, 1.0, ParamScale::kLog}}}),
            ErrorCode::kDegenerateSpace);
  EXPECT_THROW(suggest({}, ParamSpace{}, 0), Error);
}

TEST(ParamSpaceTest, UnitMappingRoundTrips) {
  const ParamSpace s{{{"lr", ParamKind::kContinuous, 1e-3, 1e-1, ParamScale::kLog},
                      {"n", ParamKind::kInteger, 2, 10, ParamScale::kLinear}}};
  const std::vector<double> p{1e-2, 6};
  const Eigen::VectorXd u = s.to_unit(p);
  EXPECT_NEAR(u(0), 0.5, 1e-12);
  EXPECT_NEAR(u(1), 0.5, 1e-12);
  const auto back = s.from_unit(u);
  EXPECT_NEAR(back[0], 1e-2, 1e-12);
  EXPECT_EQ(back[1], 6.0);
  EXPECT_EQ(s.from_unit(Eigen::Vector2d(2.0, 0.56))[1], 6.0);
  EXPECT_EQ(s.from_unit(Eigen::Vector2d(2.0, 0.56))[0], 1e-1);
  EXPECT_TRUE(s.contains(back));
  EXPECT_FALSE(s.contains({1.0, 6}));
}

TEST(ParamSpaceTest, JsonRoundTrip) {
  const ParamSpace s = default_search_space(Algorithm::kGbtLeafwise);
  const ParamSpace back = nlohmann::json(s).get<ParamSpace>();
  ASSERT_EQ(back.dimension(), s.dimension());
  for (std::size_t k = 0; k < s.dimension(); ++k) {
    EXPECT_EQ(back.dims[k].name, s.dims[k].name);
    EXPECT_EQ(back.dims[k].kind, s.dims[k].kind);
    EXPECT_EQ(back.dims[k].lower, s.dims[k].lower);
    EXPECT_EQ(back.dims[k].upper, s.dims[k].upper);
    EXPECT_EQ(back.dims[k].scale, s.dims[k].scale);
  }
}

TEST(ParamSpaceTest, DefaultSpacesFitTheRegistry) {
  for (Algorithm a : {Algorithm::kGbtLevelwise, Algorithm::kGbtLeafwise,
                      Algorithm::kSgdLinear}) {
    const ParamSpace s = default_search_space(a);
    EXPECT_NO_THROW(s.validate());
    for (const auto& d : s.dims) {
      const ParamSpec* p = schema_for(a).find(d.name);
      ASSERT_NE(p, nullptr) << d.name;
      EXPECT_GE(d.lower, p->lower);
      EXPECT_LE(d.upper, p->upper);
    }
  }
}

TEST(ExpectedImprovementTest, NonNegativeEverywhere) {
  std::mt19937_64 rng(40);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 10000; ++i) {
    const double ei = expected_improvement(normal(rng) * 5, std::abs(normal(rng)),
                                           normal(rng) * 5, 0.01);
    EXPECT_GE(ei, 0.0);
    EXPECT_TRUE(std::isfinite(ei));
  }
  EXPECT_EQ(expected_improvement(10.0, 0.0, 0.0, 0.01), 0.0);
}

TEST(ExpectedImprovementTest, MatchesClosedForm) {
  // mean = best: EI = sigma * phi(0) when xi = 0.
  EXPECT_NEAR(expected_improvement(1.0, 2.0, 1.0, 0.0),
              2.0 / std::sqrt(2.0 * std::numbers::pi), 1e-12);
}

TEST(GpTest, PosteriorVarianceIsNonNegative) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u;
  Eigen::MatrixXd X(12, 2);
  Eigen::VectorXd y(12);
  for (int i = 0; i < 12; ++i) {
    X(i, 0) = u(rng);
    X(i, 1) = u(rng);
    y(i) = std::sin(6 * X(i, 0)) + X(i, 1);
  }
  const GpSurrogate gp = GpSurrogate::fit(X, y, 1);
  for (int i = 0; i < 500; ++i) {
    const auto p = gp.predict(Eigen::Vector2d(u(rng), u(rng)));
    EXPECT_GE(p.variance, 0.0);
    EXPECT_TRUE(std::isfinite(p.mean));
  }
}

TEST(GpTest, InterpolatesTrainingPointsWithinNoise) {
  Eigen::MatrixXd X(8, 1);
  Eigen::VectorXd y(8);
  for (int i = 0; i < 8; ++i) {
    X(i, 0) = i / 7.0;
    y(i) = std::cos(4.0 * X(i, 0));
  }
  const GpSurrogate gp = GpSurrogate::fit(X, y, 2);
  for (int i = 0; i < 8; ++i) {
    const auto p = gp.predict(X.row(i).transpose());
    EXPECT_LE(std::abs(p.mean - y(i)), 3.0 * gp.noise_std() + 1e-9) << i;
  }
  EXPECT_TRUE(std::isfinite(gp.log_marginal_likelihood()));
}

TEST(SuggestTest, EmptyHistoryGivesInBoundsPoint) {
  const ParamSpace s = default_search_space(Algorithm::kGbtLevelwise);
  const auto p = suggest({}, s, 3);
  EXPECT_TRUE(s.contains(p));
  for (std::size_t k = 0; k < s.dimension(); ++k) {
    if (s.dims[k].kind == ParamKind::kInteger) {
      EXPECT_EQ(p[k], std::round(p[k]));
    }
  }
}

TEST(SuggestTest, IdenticalScoresStillGiveInBoundsPoint) {
  const ParamSpace s = unit_square();
  TrialHistory h;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u;
  for (int i = 0; i < 6; ++i) h.add({{u(rng), u(rng)}, 0.7, ""});
  const auto p = suggest(h, s, 5);
  EXPECT_TRUE(s.contains(p));
}

TEST(SuggestTest, IsDeterministicInHistoryAndSeed) {
  const ParamSpace s = unit_square();
  TrialHistory h;
  for (int i = 0; i < 5; ++i) h.add({{0.1 * i, 0.2 * i}, double(i % 3), ""});
  EXPECT_EQ(suggest(h, s, 9), suggest(h, s, 9));
}

TEST(OptimizeTest, ConcentratesNearOneDimensionalOptimum) {
  const auto f = [](const std::vector<double>& x) {
    return -(x[0] - 0.3) * (x[0] - 0.3);
  };
  const TrialHistory h = optimize(f, unit_line(), 20, 4);
  ASSERT_EQ(h.size(), 20u);
  double dev = 0.0;
  for (std::size_t i = 15; i < 20; ++i) dev += std::abs(h.trials[i].params[0] - 0.3);
  EXPECT_LT(dev / 5.0, 0.15);
}

TEST(OptimizeTest, FindsQuadraticOptimumForEverySeed) {
  const auto f = [](const std::vector<double>& x) {
    return -(x[0] - 0.5) * (x[0] - 0.5);
  };
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TrialHistory h = optimize(f, unit_line(), 30, seed);
    EXPECT_LT(std::abs(h.incumbent()->params[0] - 0.5), 0.05) << seed;
  }
}

TEST(OptimizeTest, MinimumBudgetAccounting) {
  const ParamSpace s = unit_square();
  int calls = 0;
  const auto f = [&](const std::vector<double>& x) {
    ++calls;
    return x[0] + x[1];
  };
  const TrialHistory h = optimize(f, s, 4, 1);
  EXPECT_EQ(h.size(), 4u);
  EXPECT_EQ(calls, 4);
  const auto best = std::ranges::max_element(
      h.trials, {}, [](const Trial& t) { return t.score; });
  EXPECT_EQ(h.incumbent()->score, best->score);
  EXPECT_THROW(optimize(f, s, 3, 1), Error);
}

TEST(OptimizeTest, SameSeedSameTrace) {
  const auto f = [](const std::vector<double>& x) {
    return -std::pow(x[0] - 0.2, 2) - std::pow(x[1] - 0.7, 2);
  };
  const TrialHistory a = optimize(f, unit_square(), 12, 7);
  const TrialHistory b = optimize(f, unit_square(), 12, 7);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.trials[i].params, b.trials[i].params);
    EXPECT_EQ(a.trials[i].score, b.trials[i].score);
  }
}

TEST(OptimizeTest, FailedObjectiveIsRecordedAsMinusInfinity) {
  const auto f = [](const std::vector<double>& x) -> double {
    if (x[0] < 0.8) throw std::runtime_error("diverged");
    return x[0];
  };
  const TrialHistory h = optimize(f, unit_line(), 10, 3);
  EXPECT_EQ(h.size(), 10u);
  bool saw_failure = false;
  for (const auto& t : h.trials) {
    if (t.params[0] < 0.8) {
      EXPECT_EQ(t.score, -std::numeric_limits<double>::infinity());
      saw_failure = true;
    }
  }
  EXPECT_TRUE(saw_failure);
  EXPECT_GE(h.incumbent()->params[0], 0.8);
  const auto j = trial_to_json(h.trials[0], 0, unit_line());
  EXPECT_TRUE(j.contains("timestamp"));
  EXPECT_TRUE(j.at("params").contains("x"));
}

TEST(OptimizeTest, BeatsRandomSearchOnBowl) {
  const auto f = [](const std::vector<double>& x) {
    return -std::pow(x[0] - 0.65, 2) - std::pow(x[1] - 0.35, 2);
  };
  std::vector<double> bo, rs;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    bo.push_back(optimize(f, unit_square(), 30, seed).incumbent()->score);
    rs.push_back(random_search(f, unit_square(), 30, seed).incumbent()->score);
  }
  EXPECT_GE(median(bo), median(rs));
}

TEST(IncumbentTest, EarliestBestWins) {
  TrialHistory h;
  EXPECT_EQ(h.incumbent(), nullptr);
  h.add({{0.1}, 1.0, ""});
  h.add({{0.2}, 2.0, ""});
  h.add({{0.3}, 2.0, ""});
  EXPECT_EQ(h.incumbent()->params[0], 0.2);
}

TEST(ApplyPointTest, MergesIntoSpec) {
  const ParamSpace s = default_search_space(Algorithm::kSgdLinear);
  std::vector<double> p;
  for (const auto& d : s.dims) p.push_back(d.lower);
  const RegressorSpec base{Algorithm::kSgdLinear, {{"batch_size", 16}}, 3};
  const RegressorSpec out = apply_point(base, s, p);
  EXPECT_EQ(out.hyperparams.at("batch_size"), 16);
  EXPECT_EQ(out.seed, 3u);
  for (std::size_t k = 0; k < s.dimension(); ++k) {
    EXPECT_EQ(out.hyperparams.at(s.dims[k].name), p[k]);
  }
}

}  // namespace
}  // namespace clickstack
