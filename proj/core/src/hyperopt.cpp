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

#include "clickstack/hyperopt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <numeric>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>

#include "json_util.hpp"

namespace clickstack {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string_view kind_name(ParamKind k) {
  return k == ParamKind::kInteger ? "integer" : "continuous";
}

std::string_view scale_name(ParamScale s) {
  return s == ParamScale::kLog ? "log" : "linear";
}

double radical_inverse(std::uint64_t index, unsigned base) {
  double inv = 1.0 / base;
  double factor = inv;
  double out = 0.0;
  while (index > 0) {
    out += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv;
  }
  return out;
}

unsigned nth_prime(std::size_t n) {
  static constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                         23, 29, 31, 37, 41, 43, 47, 53};
  if (n < std::size(kPrimes)) return kPrimes[n];
  unsigned candidate = kPrimes[std::size(kPrimes) - 1];
  std::size_t found = std::size(kPrimes) - 1;
  while (found < n) {
    candidate += 2;
    bool prime = true;
    for (unsigned q = 3; q * q <= candidate; q += 2) {
      if (candidate % q == 0) {
        prime = false;
        break;
      }
    }
    if (prime) ++found;
  }
  return candidate;
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

// ---------------------------------------------------------------------------
// GP internals. Hyperparameters live in log space:
//   theta = [log l_1 .. log l_d, log signal_var, log noise_var].

struct Bounds {
  Eigen::VectorXd lo, hi;
};

Bounds theta_bounds(Eigen::Index d) {
  Bounds b{Eigen::VectorXd(d + 2), Eigen::VectorXd(d + 2)};
  b.lo.head(d).setConstant(std::log(0.01));
  b.hi.head(d).setConstant(std::log(10.0));
  b.lo(d) = std::log(0.05);
  b.hi(d) = std::log(20.0);
  b.lo(d + 1) = std::log(1e-4);
  b.hi(d + 1) = std::log(1.0);
  return b;
}

Eigen::MatrixXd se_kernel(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const Eigen::VectorXd& inv_ls, double signal_var) {
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
      const double r2 =
          ((A.row(i) - B.row(j)).transpose().cwiseProduct(inv_ls))
              .squaredNorm();
      K(i, j) = signal_var * std::exp(-0.5 * r2);
    }
  }
  return K;
}

double negative_lml(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& theta) {
  const Eigen::Index d = X.cols();
  const Eigen::VectorXd inv_ls = (-theta.head(d).array()).exp().matrix();
  Eigen::MatrixXd K = se_kernel(X, X, inv_ls, std::exp(theta(d)));
  K.diagonal().array() += std::exp(theta(d + 1));
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) {
    return std::numeric_limits<double>::infinity();
  }
  const Eigen::VectorXd alpha = llt.solve(y);
  const double log_det =
      2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return 0.5 * y.dot(alpha) + 0.5 * log_det +
         0.5 * static_cast<double>(y.size()) *
             std::log(2.0 * std::numbers::pi);
}

// Box-constrained Nelder-Mead: trial points are clamped into the box before
// evaluation, which keeps the simplex inside the feasible region.
Eigen::VectorXd nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f,
    Eigen::VectorXd start, const Bounds& box, int max_evals) {
  const Eigen::Index n = start.size();
  auto clamp = [&](Eigen::VectorXd v) {
    return v.cwiseMax(box.lo).cwiseMin(box.hi).eval();
  };
  std::vector<Eigen::VectorXd> simplex;
  std::vector<double> value;
  simplex.push_back(clamp(start));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd v = simplex[0];
    const double step = 0.25 * (box.hi(i) - box.lo(i));
    v(i) = v(i) + step <= box.hi(i) ? v(i) + step : v(i) - step;
    simplex.push_back(clamp(v));
  }
  for (const auto& v : simplex) value.push_back(f(v));
  int evals = static_cast<int>(simplex.size());

  std::vector<std::size_t> order(simplex.size());
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::stable_sort(
        order, [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];
    if (std::abs(value[worst] - value[best]) < 1e-9) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      centroid += simplex[order[k]];
    }
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected =
        clamp(centroid + (centroid - simplex[worst]));
    const double f_reflected = f(reflected);
    ++evals;
    if (f_reflected < value[best]) {
      const Eigen::VectorXd expanded =
          clamp(centroid + 2.0 * (centroid - simplex[worst]));
      const double f_expanded = f(expanded);
      ++evals;
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        value[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        value[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < value[second]) {
      simplex[worst] = reflected;
      value[worst] = f_reflected;
      continue;
    }
    const Eigen::VectorXd contracted =
        clamp(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_contracted = f(contracted);
    ++evals;
    if (f_contracted < value[worst]) {
      simplex[worst] = contracted;
      value[worst] = f_contracted;
      continue;
    }
    for (std::size_t k = 0; k < simplex.size(); ++k) {
      if (k == best) continue;
      simplex[k] = clamp(simplex[best] + 0.5 * (simplex[k] - simplex[best]));
      value[k] = f(simplex[k]);
      ++evals;
    }
  }
  const auto it = std::ranges::min_element(value);
  return simplex[static_cast<std::size_t>(it - value.begin())];
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

Eigen::VectorXd unit_point(const ParamSpace& space, const Eigen::VectorXd& u) {
  // Snap to the grid of valid values so the surrogate scores what would
  // actually be evaluated.
  return space.to_unit(space.from_unit(u));
}

void check_trial(const ParamSpace& space, const std::vector<double>& p) {
  if (!space.contains(p)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "trial point lies outside the search space");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ParamSpace

void ParamSpace::validate() const {
  if (dims.empty()) {
    throw Error(ErrorCode::kDegenerateSpace, "search space has no dimensions");
  }
  for (const auto& dim : dims) {
    if (!(dim.lower < dim.upper) || !std::isfinite(dim.lower) ||
        !std::isfinite(dim.upper)) {
      throw Error(ErrorCode::kDegenerateSpace,
                  "dimension '" + dim.name + "' needs lower < upper");
    }
    if (dim.scale == ParamScale::kLog && !(dim.lower > 0.0)) {
      throw Error(ErrorCode::kDegenerateSpace,
                  "log-scale dimension '" + dim.name + "' needs lower > 0");
    }
    if (dim.kind == ParamKind::kInteger &&
        std::floor(dim.upper) < std::ceil(dim.lower)) {
      throw Error(ErrorCode::kDegenerateSpace,
                  "integer dimension '" + dim.name + "' holds no integer");
    }
  }
}

Eigen::VectorXd ParamSpace::to_unit(const std::vector<double>& point) const {
  if (point.size() != dims.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "point has wrong dimension");
  }
  Eigen::VectorXd u(static_cast<Eigen::Index>(dims.size()));
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const auto& dim = dims[i];
    double t = 0.0;
    if (dim.scale == ParamScale::kLog) {
      t = (std::log(point[i]) - std::log(dim.lower)) /
          (std::log(dim.upper) - std::log(dim.lower));
    } else {
      t = (point[i] - dim.lower) / (dim.upper - dim.lower);
    }
    u(static_cast<Eigen::Index>(i)) = std::clamp(t, 0.0, 1.0);
  }
  return u;
}

std::vector<double> ParamSpace::from_unit(const Eigen::VectorXd& unit) const {
  if (static_cast<std::size_t>(unit.size()) != dims.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "point has wrong dimension");
  }
  std::vector<double> out(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const auto& dim = dims[i];
    const double t = std::clamp(unit(static_cast<Eigen::Index>(i)), 0.0, 1.0);
    double v = 0.0;
    if (dim.scale == ParamScale::kLog) {
      v = std::exp(std::log(dim.lower) +
                   t * (std::log(dim.upper) - std::log(dim.lower)));
    } else {
      v = dim.lower + t * (dim.upper - dim.lower);
    }
    v = std::clamp(v, dim.lower, dim.upper);
    if (dim.kind == ParamKind::kInteger) {
      v = std::clamp(std::round(v), std::ceil(dim.lower), std::floor(dim.upper));
    }
    out[i] = v;
  }
  return out;
}

bool ParamSpace::contains(const std::vector<double>& point) const {
  if (point.size() != dims.size()) return false;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const double v = point[i];
    if (!(v >= dims[i].lower && v <= dims[i].upper)) return false;
    if (dims[i].kind == ParamKind::kInteger && v != std::round(v)) return false;
  }
  return true;
}

void to_json(nlohmann::json& j, const ParamSpace& space) {
  j = nlohmann::json::array();
  for (const auto& dim : space.dims) {
    j.push_back({{"name", dim.name},
                 {"kind", kind_name(dim.kind)},
                 {"lower", dim.lower},
                 {"upper", dim.upper},
                 {"scale", scale_name(dim.scale)}});
  }
}

void from_json(const nlohmann::json& j, ParamSpace& space) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kInvalidConfig, "search space must be an array");
  }
  space.dims.clear();
  for (const auto& item : j) {
    detail::require_object(item, "search space dimension",
                           {"name", "kind", "lower", "upper", "scale"});
    ParamDim dim;
    dim.name = item.at("name").get<std::string>();
    const auto kind = item.value("kind", std::string("continuous"));
    if (kind == "integer") {
      dim.kind = ParamKind::kInteger;
    } else if (kind != "continuous") {
      throw Error(ErrorCode::kInvalidConfig, "unknown dimension kind '" + kind + "'");
    }
    const auto scale = item.value("scale", std::string("linear"));
    if (scale == "log") {
      dim.scale = ParamScale::kLog;
    } else if (scale != "linear") {
      throw Error(ErrorCode::kInvalidConfig, "unknown dimension scale '" + scale + "'");
    }
    dim.lower = item.at("lower").get<double>();
    dim.upper = item.at("upper").get<double>();
    space.dims.push_back(std::move(dim));
  }
}

ParamSpace default_search_space(Algorithm algorithm) {
  using K = ParamKind;
  using S = ParamScale;
  switch (algorithm) {
    case Algorithm::kGbtLevelwise:
      return {{{"n_estimators", K::kInteger, 20, 300, S::kLinear},
               {"learning_rate", K::kContinuous, 0.01, 0.3, S::kLog},
               {"max_depth", K::kInteger, 2, 8, S::kLinear},
               {"reg_lambda", K::kContinuous, 1e-3, 10, S::kLog},
               {"min_samples_leaf", K::kInteger, 1, 30, S::kLinear}}};
    case Algorithm::kGbtLeafwise:
      return {{{"n_estimators", K::kInteger, 20, 300, S::kLinear},
               {"learning_rate", K::kContinuous, 0.01, 0.3, S::kLog},
               {"max_leaves", K::kInteger, 4, 64, S::kLinear},
               {"reg_lambda", K::kContinuous, 1e-3, 10, S::kLog},
               {"min_samples_leaf", K::kInteger, 5, 50, S::kLinear}}};
    case Algorithm::kSgdLinear:
      return {{{"eta0", K::kContinuous, 1e-4, 0.1, S::kLog},
               {"power_t", K::kContinuous, 0.1, 0.5, S::kLinear},
               {"alpha", K::kContinuous, 1e-6, 0.1, S::kLog},
               {"n_epochs", K::kInteger, 10, 100, S::kLinear}}};
    default:
      throw Error(ErrorCode::kInvalidConfig,
                  "no default search space for " +
                      std::string(to_string(algorithm)));
  }
}

// ---------------------------------------------------------------------------
// TrialHistory

void TrialHistory::add(Trial trial) {
  trials.push_back(std::move(trial));
  const std::size_t idx = trials.size() - 1;
  if (!best_ || trials[idx].score > trials[*best_].score) best_ = idx;
}

const Trial* TrialHistory::incumbent() const {
  return best_ ? &trials[*best_] : nullptr;
}

nlohmann::json trial_to_json(const Trial& trial, std::size_t index,
                             const ParamSpace& space) {
  nlohmann::json params = nlohmann::json::object();
  for (std::size_t i = 0; i < space.dims.size() && i < trial.params.size(); ++i) {
    params[space.dims[i].name] = trial.params[i];
  }
  nlohmann::json score = std::isfinite(trial.score)
                             ? nlohmann::json(trial.score)
                             : nlohmann::json("-inf");
  return {{"trial", index},
          {"params", std::move(params)},
          {"score", std::move(score)},
          {"timestamp", trial.timestamp}};
}

// ---------------------------------------------------------------------------
// GpSurrogate

GpSurrogate GpSurrogate::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             std::uint64_t seed) {
  if (X.rows() != y.size() || X.rows() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "GP needs one score per point");
  }
  GpSurrogate gp;
  gp.X_ = X;
  gp.y_mean_ = y.mean();
  const double sd =
      std::sqrt((y.array() - gp.y_mean_).square().sum() /
                static_cast<double>(y.size()));
  gp.y_scale_ = sd > 1e-12 ? sd : 1.0;
  const Eigen::VectorXd ys = (y.array() - gp.y_mean_) / gp.y_scale_;

  const Eigen::Index d = X.cols();
  const Bounds box = theta_bounds(d);
  auto objective = [&](const Eigen::VectorXd& theta) {
    return negative_lml(X, ys, theta);
  };

  std::vector<Eigen::VectorXd> starts;
  Eigen::VectorXd first(d + 2);
  first.head(d).setConstant(std::log(0.3));
  first(d) = 0.0;
  first(d + 1) = std::log(1e-2);
  starts.push_back(first);
  std::mt19937_64 rng(splitmix64(seed ^ 0x6a09e667f3bcc909ULL));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < 3; ++s) {
    Eigen::VectorXd t(d + 2);
    for (Eigen::Index i = 0; i < d + 2; ++i) {
      t(i) = box.lo(i) + unit(rng) * (box.hi(i) - box.lo(i));
    }
    starts.push_back(t);
  }

  Eigen::VectorXd best_theta = first;
  double best_value = std::numeric_limits<double>::infinity();
  const int max_evals = 100 + 40 * static_cast<int>(d + 2);
  for (const auto& start : starts) {
    const Eigen::VectorXd theta = nelder_mead(objective, start, box, max_evals);
    const double v = objective(theta);
    if (v < best_value) {
      best_value = v;
      best_theta = theta;
    }
  }

  gp.length_scales_ = best_theta.head(d).array().exp().matrix();
  gp.signal_var_ = std::exp(best_theta(d));
  gp.noise_var_ = std::exp(best_theta(d + 1));
  Eigen::MatrixXd K =
      se_kernel(X, X, gp.length_scales_.cwiseInverse(), gp.signal_var_);
  K.diagonal().array() += gp.noise_var_;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  // The noise floor keeps K positive definite; a failure here means the
  // inputs themselves were not finite.
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kNonFiniteInput, "GP kernel matrix not factorable");
  }
  gp.chol_ = llt.matrixL();
  gp.alpha_ = llt.solve(ys);
  gp.lml_ = std::isfinite(best_value) ? -best_value : kNegInf;
  return gp;
}

GpSurrogate::Prediction GpSurrogate::predict(const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd k =
      se_kernel(X_, x.transpose(), length_scales_.cwiseInverse(), signal_var_);
  const double mean = k.col(0).dot(alpha_);
  const Eigen::VectorXd v =
      chol_.triangularView<Eigen::Lower>().solve(k.col(0));
  const double var = std::max(0.0, signal_var_ - v.squaredNorm());
  return {y_mean_ + y_scale_ * mean, var * y_scale_ * y_scale_};
}

double GpSurrogate::noise_std() const {
  return std::sqrt(noise_var_) * y_scale_;
}

double expected_improvement(double mean, double sigma, double best, double xi) {
  if (!(sigma > 1e-12)) return 0.0;
  const double improvement = mean - best - xi;
  const double z = improvement / sigma;
  const double ei = improvement * normal_cdf(z) + sigma * normal_pdf(z);
  return std::max(0.0, ei);
}

// ---------------------------------------------------------------------------
// suggest / optimize

std::vector<double> suggest(const TrialHistory& history,
                            const ParamSpace& space, std::uint64_t seed,
                            const SuggestOptions& options) {
  space.validate();
  const std::size_t d = space.dimension();
  const std::size_t n = history.size();
  for (const auto& t : history.trials) check_trial(space, t.params);

  std::mt19937_64 rng(splitmix64(seed) ^ splitmix64(n + 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  if (n < d + 1) {
    // Halton point n+1 with a per-seed Cranley-Patterson rotation.
    std::mt19937_64 shift_rng(splitmix64(seed ^ 0x3c6ef372fe94f82bULL));
    Eigen::VectorXd u(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      const double shift = unit(shift_rng);
      const double h = radical_inverse(n + 1, nth_prime(i)) + shift;
      u(static_cast<Eigen::Index>(i)) = h - std::floor(h);
    }
    return space.from_unit(u);
  }

  std::vector<std::size_t> finite;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(history.trials[i].score)) finite.push_back(i);
  }

  const int m = std::max(1, options.n_candidates);
  Eigen::MatrixXd candidates(m, static_cast<Eigen::Index>(d));
  for (int c = 0; c < m; ++c) {
    Eigen::VectorXd u(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) u(static_cast<Eigen::Index>(i)) = unit(rng);
    candidates.row(c) = unit_point(space, u).transpose();
  }
  if (finite.empty()) return space.from_unit(candidates.row(0).transpose());

  Eigen::MatrixXd X(static_cast<Eigen::Index>(finite.size()),
                    static_cast<Eigen::Index>(d));
  Eigen::VectorXd y(static_cast<Eigen::Index>(finite.size()));
  for (std::size_t r = 0; r < finite.size(); ++r) {
    const auto& t = history.trials[finite[r]];
    X.row(static_cast<Eigen::Index>(r)) = space.to_unit(t.params).transpose();
    y(static_cast<Eigen::Index>(r)) = t.score;
  }
  const GpSurrogate gp = GpSurrogate::fit(X, y, splitmix64(seed + n));

  // EI is computed on the standardized scale so xi does not depend on the
  // magnitude of the objective.
  const double mean = y.mean();
  double scale = std::sqrt((y.array() - mean).square().mean());
  if (!(scale > 1e-12)) scale = 1.0;
  const double best = (y.maxCoeff() - mean) / scale;

  int best_ei = -1;
  double best_ei_value = 0.0;
  int best_var = 0;
  double best_var_value = -1.0;
  for (int c = 0; c < m; ++c) {
    const auto p = gp.predict(candidates.row(c).transpose());
    const double mu = (p.mean - mean) / scale;
    const double sigma = std::sqrt(p.variance) / scale;
    const double ei = expected_improvement(mu, sigma, best, options.xi);
    if (ei > best_ei_value) {
      best_ei_value = ei;
      best_ei = c;
    }
    if (p.variance > best_var_value) {
      best_var_value = p.variance;
      best_var = c;
    }
  }
  const int chosen = best_ei >= 0 ? best_ei : best_var;
  return space.from_unit(candidates.row(chosen).transpose());
}

namespace {

Trial evaluate_trial(const Objective& objective, std::vector<double> point) {
  Trial trial;
  trial.params = std::move(point);
  try {
    trial.score = objective(trial.params);
  } catch (const std::exception&) {
    trial.score = kNegInf;
  }
  if (!std::isfinite(trial.score)) trial.score = kNegInf;
  trial.timestamp = utc_timestamp();
  return trial;
}

void check_budget(const ParamSpace& space, int budget) {
  space.validate();
  if (budget < static_cast<int>(space.dimension()) + 2) {
    throw Error(ErrorCode::kInvalidConfig,
                "budget " + std::to_string(budget) +
                    " is below dimension + 2 = " +
                    std::to_string(space.dimension() + 2));
  }
}

}  // namespace

TrialHistory optimize(const Objective& objective, const ParamSpace& space,
                      int budget, std::uint64_t seed,
                      const SuggestOptions& options,
                      const TrialObserver& observer) {
  check_budget(space, budget);
  TrialHistory history;
  for (int i = 0; i < budget; ++i) {
    history.add(evaluate_trial(objective, suggest(history, space, seed, options)));
    if (observer) observer(history.trials.back(), history.size() - 1);
  }
  return history;
}

TrialHistory random_search(const Objective& objective, const ParamSpace& space,
                           int budget, std::uint64_t seed) {
  check_budget(space, budget);
  std::mt19937_64 rng(splitmix64(seed ^ 0xa54ff53a5f1d36f1ULL));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  TrialHistory history;
  for (int i = 0; i < budget; ++i) {
    Eigen::VectorXd u(static_cast<Eigen::Index>(space.dimension()));
    for (Eigen::Index k = 0; k < u.size(); ++k) u(k) = unit(rng);
    history.add(evaluate_trial(objective, space.from_unit(u)));
  }
  return history;
}

RegressorSpec apply_point(const RegressorSpec& base, const ParamSpace& space,
                          const std::vector<double>& point) {
  if (point.size() != space.dims.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "point has wrong dimension");
  }
  RegressorSpec spec = base;
  for (std::size_t i = 0; i < point.size(); ++i) {
    spec.hyperparams[space.dims[i].name] = point[i];
  }
  spec.validate();
  return spec;
}

}  // namespace clickstack
