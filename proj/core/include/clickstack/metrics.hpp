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

#ifndef CLICKSTACK_METRICS_HPP
#define CLICKSTACK_METRICS_HPP

#include <Eigen/Core>

namespace clickstack {

/// Coefficient of determination. May be negative and is unbounded below;
/// -infinity marks a constant truth vector that was not predicted exactly.
struct Metric {
  double r2 = 0.0;
};

/// 1 - sum (y - yhat)^2 / sum (y - mean(y))^2.
/// Throws LengthMismatch for unequal lengths and TooFewSamples below 2 rows.
Metric r2_score(const Eigen::Ref<const Eigen::VectorXd>& y,
                const Eigen::Ref<const Eigen::VectorXd>& yhat);

}  // namespace clickstack

#endif  // CLICKSTACK_METRICS_HPP
