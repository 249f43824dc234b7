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

#include "linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace clickstack::detail {

namespace {

constexpr double kJitter = 1e-8;

struct Centered {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::RowVectorXd x_mean;
  double y_mean = 0.0;
};

Centered center(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Centered c;
  c.x_mean = X.colwise().mean();
  c.y_mean = y.mean();
  c.X = X.rowwise() - c.x_mean;
  c.y = y.array() - c.y_mean;
  return c;
}

LinearFit finish(const Centered& c, Eigen::VectorXd w,
                 std::vector<std::string> warnings = {}) {
  LinearFit out;
  out.intercept = c.y_mean - c.x_mean.dot(w);
  out.weights = std::move(w);
  out.warnings = std::move(warnings);
  return out;
}

// Solves (A + jitter*I) w = b after a failed factorization.
Eigen::VectorXd jittered_solve(Eigen::MatrixXd A, const Eigen::VectorXd& b) {
  A.diagonal().array() += kJitter;
  return A.ldlt().solve(b);
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace

LinearFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Centered c = center(X, y);
  if (X.cols() == 0) return finish(c, Eigen::VectorXd());
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(c.X);
  if (qr.rank() == X.cols()) return finish(c, qr.solve(c.y));
  return finish(c, jittered_solve(c.X.transpose() * c.X, c.X.transpose() * c.y),
                {"ols: rank-deficient design, solved with ridge jitter 1e-8"});
}

LinearFit fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    double alpha) {
  const Centered c = center(X, y);
  if (X.cols() == 0) return finish(c, Eigen::VectorXd());
  Eigen::MatrixXd A = c.X.transpose() * c.X;
  A.diagonal().array() += alpha;
  const Eigen::VectorXd b = c.X.transpose() * c.y;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() == Eigen::Success) return finish(c, llt.solve(b));
  return finish(c, jittered_solve(A, b),
                {"ridge: singular system, solved with ridge jitter 1e-8"});
}

LinearFit fit_elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          double alpha, double l1_ratio, int max_iter,
                          double tol) {
  const Centered c = center(X, y);
  const Eigen::Index p = X.cols();
  const double n = static_cast<double>(X.rows());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
  if (p == 0) return finish(c, w);

  // Unnormalized penalties: (1/2)||y - Xw||^2 + l1 ||w||_1 + (l2/2)||w||^2.
  const double l1 = alpha * l1_ratio * n;
  const double l2 = alpha * (1.0 - l1_ratio) * n;
  const Eigen::VectorXd col_sq = c.X.colwise().squaredNorm().transpose();
  // w = 0 already satisfies the optimality conditions once the l1 penalty
  // reaches max|X'y|. The relative slack absorbs summation-order rounding
  // so that the critical penalty itself yields exact zeros.
  if (l1 > 0.0 &&
      (c.X.transpose() * c.y).cwiseAbs().maxCoeff() <= l1 * (1.0 + 1e-12)) {
    return finish(c, w);
  }

  Eigen::VectorXd r = c.y;
  const double y_sq = c.y.squaredNorm();
  const double gap_tol = tol * y_sq;

  std::vector<std::string> warnings;
  bool converged = false;
  for (int iter = 0; iter < max_iter; ++iter) {
    double max_w = 0.0, max_dw = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sq(j) == 0.0) continue;
      const double old = w(j);
      if (old != 0.0) r += old * c.X.col(j);
      const double rho = c.X.col(j).dot(r);
      const double updated = soft_threshold(rho, l1) / (col_sq(j) + l2);
      w(j) = updated;
      if (updated != 0.0) r -= updated * c.X.col(j);
      max_dw = std::max(max_dw, std::abs(updated - old));
      max_w = std::max(max_w, std::abs(updated));
    }
    if (max_w == 0.0 || max_dw / max_w < tol || iter == max_iter - 1) {
      if (l1 == 0.0) {
        // The duality gap is not informative without an l1 term.
        if (max_w == 0.0 || max_dw / max_w < tol) {
          converged = true;
          break;
        }
        continue;
      }
      // Duality gap of the elastic-net problem.
      const Eigen::VectorXd XtA = c.X.transpose() * r - l2 * w;
      const double dual_norm = XtA.cwiseAbs().maxCoeff();
      const double r_sq = r.squaredNorm();
      const double w_sq = w.squaredNorm();
      double scale = 1.0;
      double gap = 0.0;
      if (dual_norm > l1) {
        scale = l1 / dual_norm;
        gap = 0.5 * (r_sq + r_sq * scale * scale);
      } else {
        gap = r_sq;
      }
      gap += l1 * w.lpNorm<1>() - scale * r.dot(c.y) +
             0.5 * l2 * (1.0 + scale * scale) * w_sq;
      if (gap <= gap_tol) {
        converged = true;
        break;
      }
    }
  }
  if (!converged) {
    warnings.push_back("coordinate descent stopped at max_iter before "
                       "reaching tolerance");
  }
  return finish(c, w, std::move(warnings));
}

LinearFit fit_lasso_lars(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         double alpha, int max_iter) {
  const Centered c = center(X, y);
  const Eigen::Index p = X.cols();
  const double n = static_cast<double>(X.rows());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
  if (p == 0) return finish(c, w);

  const double stop_corr = alpha * n;
  const double tiny = 1e-12 * std::max(1.0, c.y.norm());
  const Eigen::VectorXd col_norm = c.X.colwise().norm().transpose();
  std::vector<Eigen::Index> active;
  std::vector<char> is_active(static_cast<std::size_t>(p), 0);
  std::vector<std::string> warnings;

  auto argmax_inactive = [&](const Eigen::VectorXd& corr) {
    Eigen::Index best = -1;
    double best_val = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (is_active[static_cast<std::size_t>(j)] || col_norm(j) == 0.0) continue;
      if (std::abs(corr(j)) > best_val) {
        best_val = std::abs(corr(j));
        best = j;
      }
    }
    return best;
  };

  Eigen::VectorXd corr = c.X.transpose() * c.y;
  {
    const Eigen::Index first = argmax_inactive(corr);
    if (first < 0 || std::abs(corr(first)) <= stop_corr * (1.0 + 1e-12)) {
      return finish(c, w);
    }
    active.push_back(first);
    is_active[static_cast<std::size_t>(first)] = 1;
  }

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    corr = c.X.transpose() * (c.y - c.X * w);
    // Active correlations share one magnitude up to rounding; use their max.
    double C = 0.0;
    for (Eigen::Index j : active) C = std::max(C, std::abs(corr(j)));
    if (C <= stop_corr + tiny) break;

    const auto k = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd XA(X.rows(), k);
    Eigen::VectorXd sign(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      XA.col(a) = c.X.col(active[static_cast<std::size_t>(a)]);
      sign(a) = corr(active[static_cast<std::size_t>(a)]) >= 0.0 ? 1.0 : -1.0;
    }
    Eigen::MatrixXd gram = XA.transpose() * XA;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    Eigen::VectorXd q = ldlt.solve(sign);
    if (ldlt.info() != Eigen::Success || !q.allFinite()) {
      gram.diagonal().array() += kJitter;
      q = gram.ldlt().solve(sign);
      warnings.push_back("lasso_lars: singular active Gram matrix");
    }
    const double denom = sign.dot(q);
    if (!(denom > 0.0)) break;
    const double AA = 1.0 / std::sqrt(denom);
    const Eigen::VectorXd dir = AA * q;          // coefficient direction
    const Eigen::VectorXd u = XA * dir;          // equiangular vector
    const Eigen::VectorXd a = c.X.transpose() * u;

    // Step that brings the shared correlation down to the target.
    double gamma = (C - stop_corr) / AA;
    enum class Event { kStop, kAdd, kDrop } event = Event::kStop;
    Eigen::Index event_var = -1;

    for (Eigen::Index j = 0; j < p; ++j) {
      if (is_active[static_cast<std::size_t>(j)] || col_norm(j) == 0.0) continue;
      for (double cand : {(C - corr(j)) / (AA - a(j)),
                          (C + corr(j)) / (AA + a(j))}) {
        if (cand > tiny / std::max(AA, 1.0) && cand < gamma) {
          gamma = cand;
          event = Event::kAdd;
          event_var = j;
        }
      }
    }
    for (Eigen::Index idx = 0; idx < k; ++idx) {
      const Eigen::Index j = active[static_cast<std::size_t>(idx)];
      if (dir(idx) == 0.0) continue;
      const double cand = -w(j) / dir(idx);
      if (cand > 0.0 && cand < gamma) {
        gamma = cand;
        event = Event::kDrop;
        event_var = j;
      }
    }

    for (Eigen::Index idx = 0; idx < k; ++idx) {
      w(active[static_cast<std::size_t>(idx)]) += gamma * dir(idx);
    }
    if (event == Event::kStop) break;
    if (event == Event::kAdd) {
      active.push_back(event_var);
      is_active[static_cast<std::size_t>(event_var)] = 1;
    } else {
      w(event_var) = 0.0;
      std::erase(active, event_var);
      is_active[static_cast<std::size_t>(event_var)] = 0;
    }
    if (active.empty()) break;
  }
  if (iter == max_iter) {
    warnings.push_back("lasso_lars: max_iter reached before the penalty");
  }
  return finish(c, w, std::move(warnings));
}

LinearFit fit_bayesian_ridge(const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y,
                             const BayesianRidgeOptions& opt) {
  const Centered c = center(X, y);
  const Eigen::Index p = X.cols();
  const double n = static_cast<double>(X.rows());
  if (p == 0) return finish(c, Eigen::VectorXd());

  Eigen::BDCSVD<Eigen::MatrixXd> svd(c.X,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  const Eigen::VectorXd eig = s.array().square();
  const Eigen::VectorXd Uty = svd.matrixU().transpose() * c.y;

  const double var_y = c.y.squaredNorm() / n;
  double noise_prec = 1.0 / (var_y + std::numeric_limits<double>::epsilon());
  double weight_prec = 1.0;

  auto posterior_mean = [&](double a, double l) {
    const Eigen::VectorXd scaled =
        (s.array() / (eig.array() + l / a)).matrix().cwiseProduct(Uty);
    return Eigen::VectorXd(svd.matrixV() * scaled);
  };

  Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
  bool converged = false;
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    const Eigen::VectorXd next = posterior_mean(noise_prec, weight_prec);
    const double sse = (c.y - c.X * next).squaredNorm();
    const double gamma =
        (noise_prec * eig.array() / (weight_prec + noise_prec * eig.array()))
            .sum();
    weight_prec = (gamma + 2.0 * opt.lambda_1) /
                  (next.squaredNorm() + 2.0 * opt.lambda_2);
    noise_prec = (n - gamma + 2.0 * opt.alpha_1) / (sse + 2.0 * opt.alpha_2);
    const double change = (w - next).cwiseAbs().sum();
    w = next;
    if (iter > 0 && change < opt.tol) {
      converged = true;
      break;
    }
  }
  w = posterior_mean(noise_prec, weight_prec);
  std::vector<std::string> warnings;
  if (!converged) warnings.push_back("bayesian_ridge: max_iter reached");
  LinearFit out = finish(c, w, std::move(warnings));
  out.noise_precision = noise_prec;
  out.weight_precision = weight_prec;
  return out;
}

LinearFit fit_huber(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    double epsilon, double alpha, int max_iter, double tol) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
  double b = y.mean();
  std::vector<std::string> warnings;

  auto weighted_solve = [&]() {
    const double total = weights.sum();
    const Eigen::RowVectorXd xm = (weights.transpose() * X) / total;
    const double ym = weights.dot(y) / total;
    const Eigen::MatrixXd Xc = X.rowwise() - xm;
    const Eigen::VectorXd yc = y.array() - ym;
    const Eigen::MatrixXd XtW = Xc.transpose() * weights.asDiagonal();
    Eigen::MatrixXd A = XtW * Xc;
    A.diagonal().array() += alpha;
    const Eigen::VectorXd rhs = XtW * yc;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    Eigen::VectorXd sol;
    if (llt.info() == Eigen::Success) {
      sol = llt.solve(rhs);
    } else {
      sol = jittered_solve(A, rhs);
      if (warnings.empty()) {
        warnings.push_back("huber: singular system, solved with jitter 1e-8");
      }
    }
    return std::pair<Eigen::VectorXd, double>(sol, ym - xm.dot(sol));
  };

  if (p > 0) std::tie(w, b) = weighted_solve();
  for (int iter = 0; iter < max_iter && p > 0; ++iter) {
    const Eigen::VectorXd r = (y - X * w).array() - b;
    std::vector<double> abs_r(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      abs_r[static_cast<std::size_t>(i)] = std::abs(r(i));
    }
    auto mid = abs_r.begin() + static_cast<std::ptrdiff_t>(abs_r.size() / 2);
    std::nth_element(abs_r.begin(), mid, abs_r.end());
    const double scale = 1.4826 * *mid;
    if (!(scale > 0.0)) break;  // at least half the rows fit exactly
    const double cut = epsilon * scale;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(r(i));
      weights(i) = a <= cut ? 1.0 : cut / a;
    }
    auto [w_next, b_next] = weighted_solve();
    const double change = (w_next - w).cwiseAbs().maxCoeff() +
                          std::abs(b_next - b);
    w = std::move(w_next);
    b = b_next;
    if (change < tol * std::max(1.0, w.cwiseAbs().maxCoeff())) break;
  }
  LinearFit out;
  out.weights = w;
  out.intercept = b;
  out.warnings = std::move(warnings);
  return out;
}

LinearFit fit_sgd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const SgdOptions& opt, std::uint64_t seed) {
  const Centered c = center(X, y);
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
  if (p == 0) return finish(c, w);

  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto batch = static_cast<std::size_t>(std::max(1, opt.batch_size));
  double t = 1.0;
  Eigen::VectorXd grad(p);
  for (int epoch = 0; epoch < opt.n_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      grad.setZero();
      for (std::size_t k = start; k < stop; ++k) {
        const Eigen::Index i = order[k];
        const double err = c.X.row(i).dot(w) - c.y(i);
        grad.noalias() += err * c.X.row(i).transpose();
      }
      grad /= static_cast<double>(stop - start);
      grad += opt.alpha * w;
      const double eta = opt.eta0 / std::pow(t, opt.power_t);
      w -= eta * grad;
      t += 1.0;
    }
    if (!w.allFinite()) {
      throw Error(ErrorCode::kNonFiniteInput,
                  "sgd_linear diverged; lower eta0");
    }
  }
  return finish(c, w);
}

LinearFit fit_passive_aggressive(const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& y, double C,
                                 double epsilon, int n_epochs,
                                 std::uint64_t seed) {
  const Centered c = center(X, y);
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
  if (p == 0) return finish(c, w);

  const Eigen::VectorXd row_sq = c.X.rowwise().squaredNorm();
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  for (int epoch = 0; epoch < n_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index i : order) {
      if (row_sq(i) == 0.0) continue;
      const double err = c.y(i) - c.X.row(i).dot(w);
      const double loss = std::abs(err) - epsilon;
      if (loss <= 0.0) continue;
      const double tau = std::min(C, loss / row_sq(i));
      w += (err > 0.0 ? tau : -tau) * c.X.row(i).transpose();
    }
  }
  if (!w.allFinite()) {
    throw Error(ErrorCode::kNonFiniteInput, "passive_aggressive diverged");
  }
  return finish(c, w);
}

}  // namespace clickstack::detail
