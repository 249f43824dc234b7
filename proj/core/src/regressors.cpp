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

#include "clickstack/regressors.hpp"

#include <array>
#include <cmath>

#include "json_util.hpp"
#include "linear.hpp"

namespace clickstack {

namespace {

constexpr std::array kAlgorithms{
    Algorithm::kGbtLevelwise,  Algorithm::kGbtLeafwise, Algorithm::kSgdLinear,
    Algorithm::kLasso,         Algorithm::kLassoLars,   Algorithm::kRidge,
    Algorithm::kBayesianRidge, Algorithm::kHuber,
    Algorithm::kPassiveAggressive, Algorithm::kElasticNet, Algorithm::kOls};

constexpr double kHuge = 1e12;

std::vector<AlgorithmSchema> build_registry() {
  // {name, integer, lower, upper, default}
  using P = ParamSpec;
  const std::vector<P> gbt_common{
      {"n_estimators", true, 1, 2000, 100},
      {"learning_rate", false, 1e-4, 1.0, 0.1},
      {"reg_lambda", false, 0.0, kHuge, 1.0},
      {"gamma", false, 0.0, kHuge, 0.0},
  };
  auto with = [](std::vector<P> base, std::initializer_list<P> extra) {
    base.insert(base.end(), extra.begin(), extra.end());
    return base;
  };
  const std::vector<P> cd{{"max_iter", true, 1, 1e7, 10000},
                          {"tol", false, 0.0, 1.0, 1e-6}};
  return {
      {Algorithm::kGbtLevelwise,
       with(gbt_common, {{"max_depth", true, 1, 32, 6},
                         {"min_samples_leaf", true, 1, 1e6, 1}})},
      {Algorithm::kGbtLeafwise,
       with(gbt_common, {{"max_leaves", true, 2, 4096, 31},
                         {"max_depth", true, 0, 32, 0},
                         {"min_samples_leaf", true, 1, 1e6, 20}})},
      {Algorithm::kSgdLinear,
       {{"eta0", false, 1e-8, 10.0, 0.01},
        {"power_t", false, 0.0, 1.0, 0.25},
        {"alpha", false, 0.0, kHuge, 1e-4},
        {"n_epochs", true, 1, 100000, 50},
        {"batch_size", true, 1, 1e6, 32}}},
      {Algorithm::kLasso, with({{"alpha", false, 0.0, kHuge, 1.0}}, {cd[0], cd[1]})},
      {Algorithm::kLassoLars,
       {{"alpha", false, 0.0, kHuge, 1.0}, {"max_iter", true, 1, 1e6, 500}}},
      {Algorithm::kRidge, {{"alpha", false, 0.0, kHuge, 1.0}}},
      {Algorithm::kBayesianRidge,
       {{"max_iter", true, 1, 1e6, 300},
        {"tol", false, 0.0, 1.0, 1e-6},
        {"alpha_1", false, 0.0, kHuge, 1e-6},
        {"alpha_2", false, 0.0, kHuge, 1e-6},
        {"lambda_1", false, 0.0, kHuge, 1e-6},
        {"lambda_2", false, 0.0, kHuge, 1e-6}}},
      {Algorithm::kHuber,
       {{"epsilon", false, 1.0, kHuge, 1.35},
        {"alpha", false, 0.0, kHuge, 1e-4},
        {"max_iter", true, 1, 1e6, 100},
        {"tol", false, 0.0, 1.0, 1e-8}}},
      {Algorithm::kPassiveAggressive,
       {{"C", false, 1e-12, kHuge, 1.0},
        {"epsilon", false, 0.0, kHuge, 0.1},
        {"n_epochs", true, 1, 100000, 50}}},
      {Algorithm::kElasticNet,
       with({{"alpha", false, 0.0, kHuge, 1.0},
             {"l1_ratio", false, 0.0, 1.0, 0.5}},
            {cd[0], cd[1]})},
      {Algorithm::kOls, {}},
  };
}

const std::vector<AlgorithmSchema>& registry() {
  static const std::vector<AlgorithmSchema> r = build_registry();
  return r;
}

int as_int(double v) { return static_cast<int>(std::lround(v)); }

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kGbtLevelwise: return "gbt_levelwise";
    case Algorithm::kGbtLeafwise: return "gbt_leafwise";
    case Algorithm::kSgdLinear: return "sgd_linear";
    case Algorithm::kLasso: return "lasso";
    case Algorithm::kLassoLars: return "lasso_lars";
    case Algorithm::kRidge: return "ridge";
    case Algorithm::kBayesianRidge: return "bayesian_ridge";
    case Algorithm::kHuber: return "huber";
    case Algorithm::kPassiveAggressive: return "passive_aggressive";
    case Algorithm::kElasticNet: return "elastic_net";
    case Algorithm::kOls: return "ols";
  }
  return "unknown";
}

Algorithm algorithm_from_string(std::string_view name) {
  for (Algorithm a : kAlgorithms) {
    if (to_string(a) == name) return a;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown algorithm '" + std::string(name) + "'");
}

std::span<const Algorithm> all_algorithms() { return kAlgorithms; }

bool is_gbt(Algorithm algorithm) {
  return algorithm == Algorithm::kGbtLevelwise ||
         algorithm == Algorithm::kGbtLeafwise;
}

const ParamSpec* AlgorithmSchema::find(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const AlgorithmSchema& schema_for(Algorithm algorithm) {
  for (const auto& s : registry()) {
    if (s.algorithm == algorithm) return s;
  }
  throw Error(ErrorCode::kInvalidConfig, "algorithm without schema");
}

void RegressorSpec::validate() const {
  const auto& schema = schema_for(algorithm);
  for (const auto& [name, value] : hyperparams) {
    const ParamSpec* p = schema.find(name);
    if (!p) {
      throw Error(ErrorCode::kInvalidConfig,
                  std::string(to_string(algorithm)) +
                      " has no hyperparameter '" + name + "'");
    }
    if (!std::isfinite(value) || value < p->lower || value > p->upper) {
      throw Error(ErrorCode::kInvalidConfig,
                  std::string(to_string(algorithm)) + "." + name + " = " +
                      std::to_string(value) + " outside [" +
                      std::to_string(p->lower) + ", " +
                      std::to_string(p->upper) + "]");
    }
    if (p->integer && value != std::round(value)) {
      throw Error(ErrorCode::kInvalidConfig,
                  std::string(to_string(algorithm)) + "." + name +
                      " must be an integer");
    }
  }
}

double RegressorSpec::param(std::string_view name) const {
  if (auto it = hyperparams.find(std::string(name)); it != hyperparams.end()) {
    return it->second;
  }
  if (const ParamSpec* p = schema_for(algorithm).find(name)) {
    return p->default_value;
  }
  throw Error(ErrorCode::kInvalidConfig,
              std::string(to_string(algorithm)) + " has no hyperparameter '" +
                  std::string(name) + "'");
}

void to_json(nlohmann::json& j, const RegressorSpec& spec) {
  j = nlohmann::json{{"algorithm", to_string(spec.algorithm)},
                     {"hyperparams", spec.hyperparams},
                     {"seed", spec.seed}};
}

void from_json(const nlohmann::json& j, RegressorSpec& spec) {
  detail::require_object(j, "regressor", {"algorithm", "hyperparams", "seed"});
  RegressorSpec out;
  try {
    out.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    out.hyperparams =
        j.value("hyperparams", std::map<std::string, double>{});
    out.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("regressor: ") + e.what());
  }
  out.validate();
  spec = std::move(out);
}

Eigen::Index RegressorModel::n_features() const {
  if (const auto* g = gbt()) return g->cumulative_gain.size();
  return std::get<LinearModel>(params).weights.size();
}

RegressorModel fit(const RegressorSpec& spec, const Eigen::MatrixXd& X,
                   const Eigen::VectorXd& y) {
  spec.validate();
  if (X.rows() == 0) {
    throw Error(ErrorCode::kTooFewSamples, "cannot fit on zero rows");
  }
  if (y.size() != X.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "target length != row count");
  }
  if (!X.allFinite() || !y.allFinite()) {
    throw Error(ErrorCode::kNonFiniteInput,
                std::string(to_string(spec.algorithm)) +
                    ": features and target must be finite");
  }

  RegressorModel model;
  model.spec = spec;
  auto linear = [&](detail::LinearFit f) {
    model.params = LinearModel{std::move(f.weights), f.intercept};
    model.warnings = std::move(f.warnings);
  };

  switch (spec.algorithm) {
    case Algorithm::kGbtLevelwise:
    case Algorithm::kGbtLeafwise: {
      GbtParams p;
      p.leafwise = spec.algorithm == Algorithm::kGbtLeafwise;
      p.n_estimators = as_int(spec.param("n_estimators"));
      p.learning_rate = spec.param("learning_rate");
      p.reg_lambda = spec.param("reg_lambda");
      p.gamma = spec.param("gamma");
      p.max_depth = as_int(spec.param("max_depth"));
      p.min_samples_leaf = as_int(spec.param("min_samples_leaf"));
      if (p.leafwise) p.max_leaves = as_int(spec.param("max_leaves"));
      model.params = fit_gbt(p, X, y);
      break;
    }
    case Algorithm::kSgdLinear: {
      detail::SgdOptions o;
      o.eta0 = spec.param("eta0");
      o.power_t = spec.param("power_t");
      o.alpha = spec.param("alpha");
      o.n_epochs = as_int(spec.param("n_epochs"));
      o.batch_size = as_int(spec.param("batch_size"));
      linear(detail::fit_sgd(X, y, o, spec.seed));
      break;
    }
    case Algorithm::kLasso:
      linear(detail::fit_elastic_net(X, y, spec.param("alpha"), 1.0,
                                     as_int(spec.param("max_iter")),
                                     spec.param("tol")));
      break;
    case Algorithm::kElasticNet:
      linear(detail::fit_elastic_net(X, y, spec.param("alpha"),
                                     spec.param("l1_ratio"),
                                     as_int(spec.param("max_iter")),
                                     spec.param("tol")));
      break;
    case Algorithm::kLassoLars:
      linear(detail::fit_lasso_lars(X, y, spec.param("alpha"),
                                    as_int(spec.param("max_iter"))));
      break;
    case Algorithm::kRidge:
      linear(detail::fit_ridge(X, y, spec.param("alpha")));
      break;
    case Algorithm::kBayesianRidge: {
      detail::BayesianRidgeOptions o;
      o.max_iter = as_int(spec.param("max_iter"));
      o.tol = spec.param("tol");
      o.alpha_1 = spec.param("alpha_1");
      o.alpha_2 = spec.param("alpha_2");
      o.lambda_1 = spec.param("lambda_1");
      o.lambda_2 = spec.param("lambda_2");
      linear(detail::fit_bayesian_ridge(X, y, o));
      break;
    }
    case Algorithm::kHuber:
      linear(detail::fit_huber(X, y, spec.param("epsilon"),
                               spec.param("alpha"),
                               as_int(spec.param("max_iter")),
                               spec.param("tol")));
      break;
    case Algorithm::kPassiveAggressive:
      linear(detail::fit_passive_aggressive(
          X, y, spec.param("C"), spec.param("epsilon"),
          as_int(spec.param("n_epochs")), spec.seed));
      break;
    case Algorithm::kOls:
      linear(detail::fit_ols(X, y));
      break;
  }
  if (const auto* lin = model.linear();
      lin && (!lin->weights.allFinite() || !std::isfinite(lin->intercept))) {
    throw Error(ErrorCode::kNonFiniteInput,
                std::string(to_string(spec.algorithm)) +
                    " produced non-finite parameters");
  }
  return model;
}

RegressorModel fit(const RegressorSpec& spec, const FeatureMatrix& X) {
  X.validate();
  RegressorModel model = fit(spec, X.values, X.target);
  model.feature_names = X.column_names;
  return model;
}

Eigen::VectorXd predict(const RegressorModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.n_features()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "model expects " + std::to_string(model.n_features()) +
                    " columns, got " + std::to_string(X.cols()));
  }
  if (const auto* g = model.gbt()) {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      out(i) = predict_gbt_row(*g, X.row(i));
    }
    return out;
  }
  const auto& lin = std::get<LinearModel>(model.params);
  return (X * lin.weights).array() + lin.intercept;
}

Eigen::VectorXd predict(const RegressorModel& model, const FeatureMatrix& X) {
  return predict(model, X.values);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json tree_to_json(const RegressionTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes) {
    if (n.is_leaf()) {
      nodes.push_back({{"leaf", n.weight}});
    } else {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"gain", n.gain}});
    }
  }
  return nodes;
}

RegressionTree tree_from_json(const nlohmann::json& j, Eigen::Index n_features) {
  RegressionTree tree;
  for (const auto& item : j) {
    TreeNode n;
    if (item.contains("leaf")) {
      n.weight = item.at("leaf").get<double>();
    } else {
      n.feature = item.at("feature").get<int>();
      n.threshold = item.at("threshold").get<double>();
      n.left = item.at("left").get<int>();
      n.right = item.at("right").get<int>();
      n.gain = item.at("gain").get<double>();
      if (n.feature >= n_features) {
        throw Error(ErrorCode::kParseError, "tree node feature out of range");
      }
    }
    tree.nodes.push_back(n);
  }
  const auto count = static_cast<int>(tree.nodes.size());
  for (const auto& n : tree.nodes) {
    if (!n.is_leaf() && (n.left <= 0 || n.left >= count || n.right <= 0 ||
                         n.right >= count)) {
      throw Error(ErrorCode::kParseError, "tree child index out of range");
    }
  }
  if (tree.nodes.empty()) {
    throw Error(ErrorCode::kParseError, "empty tree");
  }
  return tree;
}

}  // namespace

nlohmann::json model_to_json(const RegressorModel& model) {
  nlohmann::json spec;
  to_json(spec, model.spec);
  nlohmann::json j{{"format", "clickstack.model"},
                   {"version", kModelFormatVersion},
                   {"spec", spec},
                   {"feature_names", model.feature_names},
                   {"warnings", model.warnings}};
  if (const auto* g = model.gbt()) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : g->trees) trees.push_back(tree_to_json(t));
    j["gbt"] = {{"base_score", g->base_score},
                {"learning_rate", g->learning_rate},
                {"cumulative_gain", detail::to_json_array(g->cumulative_gain)},
                {"training_loss", g->training_loss},
                {"trees", trees}};
  } else {
    const auto& lin = std::get<LinearModel>(model.params);
    j["linear"] = {{"weights", detail::to_json_array(lin.weights)},
                   {"intercept", lin.intercept}};
  }
  return j;
}

RegressorModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "clickstack.model" ||
      j.value("version", 0) != kModelFormatVersion) {
    throw Error(ErrorCode::kParseError, "not a version-1 clickstack model");
  }
  RegressorModel model;
  model.spec = j.at("spec").get<RegressorSpec>();
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  model.warnings = j.at("warnings").get<std::vector<std::string>>();
  if (j.contains("gbt")) {
    const auto& g = j.at("gbt");
    GbtModel m;
    m.base_score = g.at("base_score").get<double>();
    m.learning_rate = g.at("learning_rate").get<double>();
    m.cumulative_gain = detail::vector_from_json(g.at("cumulative_gain"));
    m.training_loss = g.at("training_loss").get<std::vector<double>>();
    for (const auto& t : g.at("trees")) {
      m.trees.push_back(tree_from_json(t, m.cumulative_gain.size()));
    }
    model.params = std::move(m);
  } else {
    const auto& l = j.at("linear");
    model.params = LinearModel{detail::vector_from_json(l.at("weights")),
                               l.at("intercept").get<double>()};
  }
  if (is_gbt(model.spec.algorithm) != (model.gbt() != nullptr)) {
    throw Error(ErrorCode::kParseError, "algorithm tag does not match parameters");
  }
  return model;
}

}  // namespace clickstack
