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

#include "clickstack/metrics.hpp"

#include <limits>
#include <string>

#include "clickstack/common.hpp"

namespace clickstack {

Metric r2_score(const Eigen::Ref<const Eigen::VectorXd>& y,
                const Eigen::Ref<const Eigen::VectorXd>& yhat) {
  if (y.size() != yhat.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(y.size()) + " targets vs " +
                    std::to_string(yhat.size()) + " predictions");
  }
  if (y.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples, "r2 needs at least 2 samples");
  }
  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();
  const double ss_res = (y - yhat).squaredNorm();
  if (ss_tot == 0.0) {
    return {ss_res == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity()};
  }
  return {1.0 - ss_res / ss_tot};
}

}  // namespace clickstack
