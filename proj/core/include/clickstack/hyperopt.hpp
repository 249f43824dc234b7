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

#ifndef CLICKSTACK_HYPEROPT_HPP
#define CLICKSTACK_HYPEROPT_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "clickstack/regressors.hpp"

namespace clickstack {

enum class ParamKind { kContinuous, kInteger };
enum class ParamScale { kLinear, kLog };

struct ParamDim {
  std::string name;
  ParamKind kind = ParamKind::kContinuous;
  double lower = 0.0;
  double upper = 1.0;
  ParamScale scale = ParamScale::kLinear;
};

/// Box-shaped search domain. Points are vectors aligned with `dims`.
/// Internally every dimension is mapped to [0, 1] (through log() for log
/// scale), which is where the surrogate lives.
struct ParamSpace {
  std::vector<ParamDim> dims;

  std::size_t dimension() const noexcept { return dims.size(); }

  /// Throws DegenerateSpace for an empty space or a dimension with
  /// lower >= upper (or, on log scale, lower <= 0).
  void validate() const;

  Eigen::VectorXd to_unit(const std::vector<double>& point) const;
  /// Inverse of to_unit, clamped to bounds; integer dims are rounded.
  std::vector<double> from_unit(const Eigen::VectorXd& unit) const;
  bool contains(const std::vector<double>& point) const;
};

void to_json(nlohmann::json& j, const ParamSpace& space);
void from_json(const nlohmann::json& j, ParamSpace& space);

/// Search space used when tuning `algorithm` without an explicit override.
/// Defined for gbt_levelwise, gbt_leafwise and sgd_linear.
ParamSpace default_search_space(Algorithm algorithm);

struct Trial {
  std::vector<double> params;
  double score = 0.0;  // -inf marks a failed evaluation
  std::string timestamp;
};

struct TrialHistory {
  std::vector<Trial> trials;

  void add(Trial trial);
  /// Best trial so far (earliest on ties); nullptr when empty.
  const Trial* incumbent() const;
  std::size_t size() const noexcept { return trials.size(); }

 private:
  std::optional<std::size_t> best_;
};

/// One JSON object per trial: {"trial", "params", "score", "timestamp"}.
nlohmann::json trial_to_json(const Trial& trial, std::size_t index,
                             const ParamSpace& space);

/// Zero-mean GP over [0,1]^d with a squared-exponential ARD kernel,
/// trained on standardized scores.
class GpSurrogate {
 public:
  struct Prediction {
    double mean;
    double variance;
  };

  /// Fits kernel hyperparameters by maximizing the log marginal likelihood
  /// with multi-start Nelder-Mead. `X` holds one point per row.
  static GpSurrogate fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         std::uint64_t seed);

  /// Posterior in the original score units; variance is clamped at 0.
  Prediction predict(const Eigen::VectorXd& x) const;

  double noise_std() const;  // observation noise, original score units
  const Eigen::VectorXd& length_scales() const { return length_scales_; }
  double log_marginal_likelihood() const { return lml_; }

 private:
  Eigen::MatrixXd X_;
  Eigen::VectorXd alpha_;
  Eigen::MatrixXd chol_;  // lower Cholesky factor of K + noise I
  Eigen::VectorXd length_scales_;
  double signal_var_ = 1.0;
  double noise_var_ = 1e-2;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double lml_ = 0.0;
};

/// EI for maximization, >= 0. Returns 0 when sigma is (numerically) 0.
double expected_improvement(double mean, double sigma, double best, double xi);

struct SuggestOptions {
  int n_candidates = 512;
  double xi = 0.01;  // applied to standardized scores
};

/// Next point to evaluate. The first d+1 calls (by history length) return
/// points of a randomly shifted Halton sequence; afterwards the EI-maximal
/// point among n_candidates uniform draws. Deterministic in (history, seed).
std::vector<double> suggest(const TrialHistory& history,
                            const ParamSpace& space, std::uint64_t seed,
                            const SuggestOptions& options = {});

using Objective = std::function<double(const std::vector<double>&)>;
using TrialObserver = std::function<void(const Trial&, std::size_t)>;

/// Runs exactly `budget` objective evaluations (budget >= d + 2). A throwing
/// objective or a non-finite score is recorded as -inf.
TrialHistory optimize(const Objective& objective, const ParamSpace& space,
                      int budget, std::uint64_t seed,
                      const SuggestOptions& options = {},
                      const TrialObserver& observer = {});

/// Uniform random search baseline with the same bookkeeping.
TrialHistory random_search(const Objective& objective, const ParamSpace& space,
                           int budget, std::uint64_t seed);

/// Merges a point of `space` into `base`'s hyperparameters.
RegressorSpec apply_point(const RegressorSpec& base, const ParamSpace& space,
                          const std::vector<double>& point);

}  // namespace clickstack

#endif  // CLICKSTACK_HYPEROPT_HPP
