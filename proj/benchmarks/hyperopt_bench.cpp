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


#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "clickstack/hyperopt.hpp"

namespace {

using clickstack::ParamKind;
using clickstack::ParamScale;

clickstack::ParamSpace cube(int d) {
  clickstack::ParamSpace s;
  for (int k = 0; k < d; ++k) {
    s.dims.push_back({"x" + std::to_string(k), ParamKind::kContinuous, 0.0,
                      1.0, ParamScale::kLinear});
  }
  return s;
}

clickstack::TrialHistory history(int d, int n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u;
  clickstack::TrialHistory h;
  for (int i = 0; i < n; ++i) {
    std::vector<double> x(static_cast<std::size_t>(d));
    double score = 0.0;
    for (auto& v : x) {
      v = u(rng);
      score -= (v - 0.4) * (v - 0.4);
    }
    h.add({x, score, ""});
  }
  return h;
}

void BM_GpFit(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const auto h = history(d, n);
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) X(i, k) = h.trials[i].params[k];
    y(i) = h.trials[i].score;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(clickstack::GpSurrogate::fit(X, y, 1));
  }
}
BENCHMARK(BM_GpFit)
    ->ArgsProduct({{1, 5}, {10, 30, 50}})
    ->ArgNames({"dims", "trials"})
    ->Unit(benchmark::kMillisecond);

void BM_Suggest(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const auto space = cube(d);
  const auto h = history(d, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(clickstack::suggest(h, space, 3));
  }
}
BENCHMARK(BM_Suggest)
    ->ArgsProduct({{1, 5}, {10, 30, 50}})
    ->ArgNames({"dims", "trials"})
    ->Unit(benchmark::kMillisecond);

}  // namespace
