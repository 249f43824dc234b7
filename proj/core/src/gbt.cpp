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

// Squared-loss gradient boosting with exact greedy split search.
//
// For squared loss the per-row gradient is g = prediction - target and the
// hessian is 1, so a node's H is simply its row count. A leaf's weight is
// -G / (H + lambda) and a split scores
//
//   gain = 1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)] - gamma.
//
// Each feature keeps its own presorted permutation of the training rows.
// Every tree node owns the same contiguous [begin, end) range in all of
// them, and splitting a node stably partitions that range, so sortedness
// survives without re-sorting.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "clickstack/regressors.hpp"

namespace clickstack {

double RegressionTree::predict_row(
    const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int idx = 0;
  while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
    const auto& node = nodes[static_cast<std::size_t>(idx)];
    idx = row(node.feature) < node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(idx)].weight;
}

double predict_gbt_row(const GbtModel& model,
                       const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  double out = model.base_score;
  for (const auto& tree : model.trees) {
    out += model.learning_rate * tree.predict_row(row);
  }
  return out;
}

namespace {

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  std::size_t left_count = 0;  // rows routed left, within the node range

  bool valid() const noexcept { return feature >= 0; }
};

class TreeBuilder {
 public:
  TreeBuilder(const GbtParams& params, const Eigen::MatrixXd& X)
      : params_(params), X_(X) {
    const auto n = static_cast<std::size_t>(X.rows());
    const auto p = static_cast<std::size_t>(X.cols());
    presorted_.resize(p);
    for (std::size_t f = 0; f < p; ++f) {
      auto& order = presorted_[f];
      order.resize(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      const auto col = X.col(static_cast<Eigen::Index>(f));
      std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) {
        return col(static_cast<Eigen::Index>(a)) <
               col(static_cast<Eigen::Index>(b));
      });
    }
    goes_left_.resize(n);
    scratch_.resize(n);
  }

  // Grows one tree on gradients `grad`; adds learning_rate * leaf weight to
  // `prediction` for every row and accumulates split gains into `gain`.
  RegressionTree grow(const std::vector<double>& grad,
                      std::vector<double>& prediction, Eigen::VectorXd& gain) {
    work_ = presorted_;
    grad_ = &grad;
    RegressionTree tree;
    const std::size_t n = grad.size();

    struct Pending {
      int node;
      std::size_t begin, end;
      int depth;
      double G;
      SplitCandidate split;
    };
    auto make_pending = [&](int node, std::size_t begin, std::size_t end,
                            int depth) {
      double G = 0.0;
      for (std::size_t k = begin; k < end; ++k) G += grad[first_order()[k]];
      Pending p{node, begin, end, depth, G, {}};
      const bool depth_ok =
          params_.max_depth <= 0 || depth < params_.max_depth;
      if (depth_ok) p.split = best_split(begin, end, G);
      return p;
    };
    auto set_leaf = [&](const Pending& p) {
      const double H = static_cast<double>(p.end - p.begin);
      const double w = -p.G / (H + params_.reg_lambda);
      tree.nodes[static_cast<std::size_t>(p.node)].weight = w;
      for (std::size_t k = p.begin; k < p.end; ++k) {
        prediction[first_order()[k]] += params_.learning_rate * w;
      }
    };
    auto apply_split = [&](const Pending& p) -> std::pair<Pending, Pending> {
      partition(p.begin, p.end, p.split);
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[static_cast<std::size_t>(p.node)];
      node.feature = p.split.feature;
      node.threshold = p.split.threshold;
      node.gain = p.split.gain;
      node.left = left;
      node.right = left + 1;
      gain(p.split.feature) += p.split.gain;
      const std::size_t mid = p.begin + p.split.left_count;
      return {make_pending(left, p.begin, mid, p.depth + 1),
              make_pending(left + 1, mid, p.end, p.depth + 1)};
    };

    tree.nodes.emplace_back();
    Pending root = make_pending(0, 0, n, 0);

    if (!params_.leafwise) {
      // Depth-first expansion of every splittable node; the resulting tree
      // equals level-by-level growth to max_depth.
      std::vector<Pending> stack{root};
      while (!stack.empty()) {
        Pending p = stack.back();
        stack.pop_back();
        if (!p.split.valid()) {
          set_leaf(p);
          continue;
        }
        auto [l, r] = apply_split(p);
        stack.push_back(r);
        stack.push_back(l);
      }
    } else {
      // Best-first: always split the open leaf with the largest gain, ties
      // going to the older node.
      auto worse = [](const Pending& a, const Pending& b) {
        if (a.split.gain != b.split.gain) return a.split.gain < b.split.gain;
        return a.node > b.node;
      };
      std::priority_queue<Pending, std::vector<Pending>, decltype(worse)>
          open(worse);
      std::vector<Pending> closed;
      int leaves = 1;
      if (root.split.valid()) {
        open.push(root);
      } else {
        closed.push_back(root);
      }
      while (!open.empty() && leaves < params_.max_leaves) {
        Pending p = open.top();
        open.pop();
        auto [l, r] = apply_split(p);
        ++leaves;
        for (auto& child : {l, r}) {
          if (child.split.valid()) {
            open.push(child);
          } else {
            closed.push_back(child);
          }
        }
      }
      while (!open.empty()) {
        closed.push_back(open.top());
        open.pop();
      }
      for (const auto& p : closed) set_leaf(p);
    }
    return tree;
  }

 private:
  const std::vector<std::size_t>& first_order() const { return work_[0]; }

  SplitCandidate best_split(std::size_t begin, std::size_t end,
                            double G) const {
    SplitCandidate best;
    const std::size_t count = end - begin;
    const auto min_leaf = static_cast<std::size_t>(
        std::max(1, params_.min_samples_leaf));
    if (count < 2 * min_leaf) return best;
    const double lambda = params_.reg_lambda;
    const double H = static_cast<double>(count);
    const double parent = G * G / (H + lambda);
    const auto& grad = *grad_;

    for (std::size_t f = 0; f < work_.size(); ++f) {
      const auto& order = work_[f];
      const auto col = X_.col(static_cast<Eigen::Index>(f));
      double GL = 0.0;
      for (std::size_t k = begin; k + 1 < end; ++k) {
        GL += grad[order[k]];
        const std::size_t nl = k + 1 - begin;
        const double x_here = col(static_cast<Eigen::Index>(order[k]));
        const double x_next = col(static_cast<Eigen::Index>(order[k + 1]));
        if (!(x_here < x_next)) continue;
        if (nl < min_leaf) continue;
        if (count - nl < min_leaf) break;
        const double HL = static_cast<double>(nl);
        const double GR = G - GL;
        const double HR = H - HL;
        const double gain =
            0.5 * (GL * GL / (HL + lambda) + GR * GR / (HR + lambda) - parent) -
            params_.gamma;
        // Strict comparison keeps the lowest feature, then lowest threshold.
        if (gain > best.gain) {
          double threshold = 0.5 * (x_here + x_next);
          if (!(threshold > x_here)) threshold = x_next;
          best = {static_cast<int>(f), threshold, gain, nl};
        }
      }
    }
    return best;
  }

  void partition(std::size_t begin, std::size_t end,
                 const SplitCandidate& split) {
    const auto& by_feature = work_[static_cast<std::size_t>(split.feature)];
    for (std::size_t k = begin; k < end; ++k) {
      goes_left_[by_feature[k]] = (k - begin) < split.left_count;
    }
    for (auto& order : work_) {
      std::size_t out = begin;
      std::size_t spill = 0;
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t row = order[k];
        if (goes_left_[row]) {
          order[out++] = row;
        } else {
          scratch_[spill++] = row;
        }
      }
      std::copy_n(scratch_.begin(), spill, order.begin() + out);
    }
  }

  const GbtParams& params_;
  const Eigen::MatrixXd& X_;
  std::vector<std::vector<std::size_t>> presorted_;
  std::vector<std::vector<std::size_t>> work_;
  std::vector<char> goes_left_;
  std::vector<std::size_t> scratch_;
  const std::vector<double>* grad_ = nullptr;
};

double mean_squared_error(const std::vector<double>& pred,
                          const Eigen::VectorXd& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = pred[i] - y(static_cast<Eigen::Index>(i));
    acc += r * r;
  }
  return acc / static_cast<double>(pred.size());
}

}  // namespace

GbtModel fit_gbt(const GbtParams& params, const Eigen::MatrixXd& X,
                 const Eigen::VectorXd& y) {
  const auto n = static_cast<std::size_t>(X.rows());
  GbtModel model;
  model.learning_rate = params.learning_rate;
  model.base_score = y.mean();
  model.cumulative_gain = Eigen::VectorXd::Zero(X.cols());

  std::vector<double> prediction(n, model.base_score);
  std::vector<double> grad(n);
  model.training_loss.push_back(mean_squared_error(prediction, y));
  if (X.cols() == 0) return model;

  // A matrix with no columns has nothing to split on; likewise trees on
  // data without any positive-gain split are single leaves.
  TreeBuilder builder(params, X);
  for (int round = 0; round < params.n_estimators; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] = prediction[i] - y(static_cast<Eigen::Index>(i));
    }
    model.trees.push_back(builder.grow(grad, prediction, model.cumulative_gain));
    model.training_loss.push_back(mean_squared_error(prediction, y));
  }
  return model;
}

Eigen::VectorXd feature_importance(const GbtModel& model) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(model.cumulative_gain.size());
  if (model.trees.empty()) return out;
  const double E = static_cast<double>(model.trees.size());
  for (Eigen::Index f = 0; f < out.size(); ++f) {
    out(f) = std::sqrt(std::max(0.0, model.cumulative_gain(f)) / E);
  }
  return out;
}

}  // namespace clickstack
