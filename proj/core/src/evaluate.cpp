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

#include "clickstack/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "json_util.hpp"

namespace clickstack {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::size_t> rows_matching(const RawTable& table, auto&& pred) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (pred(table.dates[r])) rows.push_back(r);
  }
  return rows;
}

std::vector<std::size_t> matrix_rows(const FeatureMatrix& m, auto&& pred) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < m.row_keys.size(); ++r) {
    if (pred(m.row_keys[r].date)) rows.push_back(r);
  }
  return rows;
}

// Subspace columns that the matrix actually has, in subspace order.
std::vector<std::string> present_columns(const FeatureMatrix& m,
                                         const FeatureSubspace& subspace) {
  std::vector<std::string> out;
  for (const auto& name : subspace.features) {
    if (m.column_index(name)) out.push_back(name);
  }
  if (out.empty()) {
    throw Error(ErrorCode::kMissingColumn,
                "none of the selected features exist in the day's matrix");
  }
  return out;
}

const BaseModelConfig* base_for(const EvaluationConfig& cfg,
                                Algorithm algorithm) {
  for (const auto& b : cfg.bases) {
    if (b.spec.algorithm == algorithm) return &b;
  }
  return nullptr;
}

RegressorSpec tuning_base(const EvaluationConfig& cfg, Algorithm a) {
  const BaseModelConfig* base = base_for(cfg, a);
  RegressorSpec spec = base ? base->spec : RegressorSpec{a, {}, 0};
  spec.seed = cfg.seed;
  return spec;
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
  return seed ^ fnv1a64(tag);
}

std::string describe(const std::exception& e) { return e.what(); }

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

ParamSpace TuningConfig::space_for(Algorithm algorithm) const {
  if (auto it = spaces.find(algorithm); it != spaces.end()) return it->second;
  return default_search_space(algorithm);
}

std::vector<BaseModelConfig> EvaluationConfig::default_bases() {
  std::vector<BaseModelConfig> out;
  for (Algorithm a : all_algorithms()) {
    if (a == Algorithm::kOls) continue;
    out.push_back({std::string(to_string(a)), RegressorSpec{a, {}, 0}});
  }
  return out;
}

void EvaluationConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidConfig, msg);
  };
  preprocess.validate();
  if (validation_days < 1) fail("validation_days must be >= 1");
  if (test_days < 1) fail("test_days must be >= 1");
  if (folds < 1) fail("folds must be >= 1");
  if (min_train_days <= validation_days) {
    fail("min_train_days must exceed validation_days");
  }
  if (min_train_days < folds + 1) fail("min_train_days must be >= folds + 1");
  if (!is_gbt(selection_model.algorithm)) {
    fail("selection_model must be a gradient-boosted tree");
  }
  selection_model.validate();
  if (bases.size() < 2) fail("at least two base models are required");
  std::set<std::string> names;
  for (const auto& b : bases) {
    if (b.name.empty()) fail("base model names must be non-empty");
    if (!names.insert(b.name).second) {
      fail("duplicate base model name '" + b.name + "'");
    }
    b.spec.validate();
  }
  for (Algorithm m : metas) {
    if (!is_meta_algorithm(m)) {
      fail(std::string(to_string(m)) + " is not an allowed meta regressor");
    }
  }
  if (tuning.budget < 1) fail("tuning budget must be >= 1");
  if (tuning.n_candidates < 1) fail("tuning candidates must be >= 1");
  for (Algorithm a : tuning.algorithms) {
    const ParamSpace space = tuning.space_for(a);
    space.validate();
    if (tuning.budget < static_cast<int>(space.dimension()) + 2) {
      fail("tuning budget for " + std::string(to_string(a)) +
           " must be >= dimension + 2");
    }
    const auto& schema = schema_for(a);
    for (const auto& dim : space.dims) {
      const ParamSpec* p = schema.find(dim.name);
      if (p == nullptr) {
        fail(std::string(to_string(a)) + " has no hyperparameter '" +
             dim.name + "'");
      }
      if (dim.lower < p->lower || dim.upper > p->upper) {
        fail("search range of " + dim.name + " exceeds its allowed bounds");
      }
    }
  }
}

void to_json(nlohmann::json& j, const EvaluationConfig& cfg) {
  nlohmann::json bases = nlohmann::json::array();
  for (const auto& b : cfg.bases) {
    nlohmann::json e = b.spec;
    e["name"] = b.name;
    bases.push_back(std::move(e));
  }
  nlohmann::json tuned = nlohmann::json::array();
  for (Algorithm a : cfg.tuning.algorithms) tuned.push_back(to_string(a));
  nlohmann::json spaces = nlohmann::json::object();
  for (const auto& [a, space] : cfg.tuning.spaces) {
    spaces[std::string(to_string(a))] = space;
  }
  nlohmann::json metas = nlohmann::json::array();
  for (Algorithm m : cfg.metas) metas.push_back(to_string(m));

  j = nlohmann::json{
      {"preprocess", cfg.preprocess},
      {"validation_days", cfg.validation_days},
      {"select_features", cfg.select_features},
      {"selection_model", cfg.selection_model},
      {"tuning",
       {{"budget", cfg.tuning.budget},
        {"models", tuned},
        {"spaces", spaces},
        {"candidates", cfg.tuning.n_candidates}}},
      {"bases", bases},
      {"metas", metas},
      {"folds", cfg.folds},
      {"first_test_day", cfg.first_test_day
                             ? nlohmann::json(cfg.first_test_day->to_string())
                             : nlohmann::json(nullptr)},
      {"test_days", cfg.test_days},
      {"min_train_days", cfg.min_train_days},
      {"refresh_daily", cfg.refresh_daily},
      {"seed", cfg.seed}};
}

void from_json(const nlohmann::json& j, EvaluationConfig& cfg) {
  detail::require_object(
      j, "evaluation",
      {"preprocess", "validation_days", "select_features", "selection_model",
       "tuning", "bases", "metas", "folds", "first_test_day", "test_days",
       "min_train_days", "refresh_daily", "seed"});
  EvaluationConfig out;
  try {
    if (j.contains("preprocess")) {
      out.preprocess = j.at("preprocess").get<PreprocessConfig>();
    }
    out.validation_days = j.value("validation_days", out.validation_days);
    out.select_features = j.value("select_features", out.select_features);
    if (j.contains("selection_model")) {
      out.selection_model = j.at("selection_model").get<RegressorSpec>();
    }
    if (j.contains("tuning")) {
      const auto& t = j.at("tuning");
      detail::require_object(t, "tuning",
                             {"budget", "models", "spaces", "candidates"});
      out.tuning.budget = t.value("budget", out.tuning.budget);
      out.tuning.n_candidates = t.value("candidates", out.tuning.n_candidates);
      if (t.contains("models")) {
        out.tuning.algorithms.clear();
        for (const auto& name : t.at("models")) {
          out.tuning.algorithms.push_back(
              algorithm_from_string(name.get<std::string>()));
        }
      }
      if (t.contains("spaces")) {
        detail::require_object(t.at("spaces"), "tuning.spaces",
                               {"gbt_levelwise", "gbt_leafwise", "sgd_linear",
                                "lasso", "lasso_lars", "ridge",
                                "bayesian_ridge", "huber",
                                "passive_aggressive", "elastic_net", "ols"});
        for (const auto& item : t.at("spaces").items()) {
          out.tuning.spaces[algorithm_from_string(item.key())] =
              item.value().get<ParamSpace>();
        }
      }
    }
    if (j.contains("bases")) {
      out.bases.clear();
      for (const auto& e : j.at("bases")) {
        detail::require_object(e, "base model",
                               {"name", "algorithm", "hyperparams", "seed"});
        nlohmann::json spec_json = e;
        spec_json.erase("name");
        BaseModelConfig b;
        b.spec = spec_json.get<RegressorSpec>();
        b.name = e.value("name", std::string(to_string(b.spec.algorithm)));
        out.bases.push_back(std::move(b));
      }
    }
    if (j.contains("metas")) {
      out.metas.clear();
      for (const auto& name : j.at("metas")) {
        out.metas.push_back(algorithm_from_string(name.get<std::string>()));
      }
    }
    out.folds = j.value("folds", out.folds);
    if (j.contains("first_test_day") && !j.at("first_test_day").is_null()) {
      out.first_test_day = Date::parse(j.at("first_test_day").get<std::string>());
    }
    out.test_days = j.value("test_days", out.test_days);
    out.min_train_days = j.value("min_train_days", out.min_train_days);
    out.refresh_daily = j.value("refresh_daily", out.refresh_daily);
    out.seed = j.value("seed", out.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string("evaluation: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidConfig) throw;
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  out.validate();
  cfg = std::move(out);
}

std::vector<std::string> variant_names(const EvaluationConfig& cfg) {
  std::vector<std::string> names;
  for (const auto& b : cfg.bases) names.push_back(b.name);
  names.emplace_back("average");
  names.emplace_back("weighted_average");
  for (Algorithm m : cfg.metas) names.push_back("stack_" + std::string(to_string(m)));
  for (Algorithm m : cfg.metas) names.push_back("blend_" + std::string(to_string(m)));
  return names;
}

// ---------------------------------------------------------------------------
// Stages

std::vector<Date> plan_test_days(const RawTable& table,
                                 const EvaluationConfig& cfg) {
  const std::vector<Date> dates = table.distinct_dates();
  std::size_t first = 0;
  if (cfg.first_test_day) {
    auto it = std::ranges::find(dates, *cfg.first_test_day);
    if (it == dates.end()) {
      throw Error(ErrorCode::kDayAbsent,
                  "first test day " + cfg.first_test_day->to_string() +
                      " has no rows");
    }
    first = static_cast<std::size_t>(it - dates.begin());
  } else {
    const auto n = static_cast<std::size_t>(cfg.test_days);
    if (dates.size() < n) {
      throw Error(ErrorCode::kInsufficientHistory,
                  "table spans " + std::to_string(dates.size()) +
                      " days, fewer than the " + std::to_string(n) +
                      " test days");
    }
    first = dates.size() - n;
  }
  if (first < static_cast<std::size_t>(cfg.min_train_days)) {
    throw Error(ErrorCode::kInsufficientHistory,
                std::to_string(first) + " days precede the first test day, " +
                    std::to_string(cfg.min_train_days) + " required");
  }
  if (first + static_cast<std::size_t>(cfg.test_days) > dates.size()) {
    throw Error(ErrorCode::kInsufficientHistory,
                "table ends before the last test day");
  }
  return {dates.begin() + static_cast<std::ptrdiff_t>(first),
          dates.begin() + static_cast<std::ptrdiff_t>(first) + cfg.test_days};
}

TuningWindow make_tuning_window(const RawTable& table, Date test_day,
                                const EvaluationConfig& cfg) {
  const RawTable train =
      table.select_rows(rows_matching(table, [&](Date d) { return d < test_day; }));
  const std::vector<Date> days = train.distinct_dates();
  if (days.size() <= static_cast<std::size_t>(cfg.validation_days)) {
    throw Error(ErrorCode::kInsufficientHistory,
                "train window too short for the validation split");
  }
  const Date val_start = days[days.size() - static_cast<std::size_t>(cfg.validation_days)];
  const RawTable sub =
      train.select_rows(rows_matching(train, [&](Date d) { return d < val_start; }));

  TuningWindow w{test_day, Pipeline::fit(sub, cfg.preprocess), {}, {}};
  const FeatureMatrix all = w.pipeline.transform(train);
  w.sub_train = all.select_rows(matrix_rows(all, [&](Date d) { return d < val_start; }));
  w.validation = all.select_rows(matrix_rows(all, [&](Date d) { return d >= val_start; }));
  return w;
}

SelectionResult select_features(const TuningWindow& window,
                                 const EvaluationConfig& cfg) {
  RegressorSpec spec = cfg.selection_model;
  spec.seed = cfg.seed;
  SelectionResult out;
  out.ranking = rank_features(window.sub_train, spec);
  if (cfg.select_features) {
    out.subspace = recursive_eliminate(window.sub_train, window.validation,
                                       out.ranking, spec);
  } else {
    out.subspace.features = window.sub_train.column_names;
    const RegressorModel m = fit(spec, window.sub_train);
    out.subspace.validation_r2 =
        r2_score(window.validation.target, predict(m, window.validation)).r2;
  }
  return out;
}

std::vector<TuningResult> tune_models(
    const TuningWindow& window, const FeatureSubspace& subspace,
    const EvaluationConfig& cfg,
    const std::function<void(Algorithm, const Trial&, std::size_t)>& observer) {
  const FeatureMatrix sub = window.sub_train.select_columns(subspace.features);
  const FeatureMatrix val = window.validation.select_columns(subspace.features);

  std::vector<TuningResult> out;
  for (Algorithm a : cfg.tuning.algorithms) {
    const ParamSpace space = cfg.tuning.space_for(a);
    const RegressorSpec base = tuning_base(cfg, a);
    const Objective objective = [&](const std::vector<double>& point) {
      const RegressorSpec spec = apply_point(base, space, point);
      return r2_score(val.target, predict(fit(spec, sub), val)).r2;
    };
    SuggestOptions options;
    options.n_candidates = cfg.tuning.n_candidates;
    TrialObserver watch;
    if (observer) {
      watch = [&](const Trial& t, std::size_t i) { observer(a, t, i); };
    }
    out.push_back(finish_tuning(
        cfg, a,
        optimize(objective, space, cfg.tuning.budget,
                 mix_seed(cfg.seed, to_string(a)), options, watch)));
  }
  return out;
}

TuningResult finish_tuning(const EvaluationConfig& cfg, Algorithm algorithm,
                           TrialHistory history) {
  TuningResult result;
  result.algorithm = algorithm;
  result.space = cfg.tuning.space_for(algorithm);
  const RegressorSpec base = tuning_base(cfg, algorithm);
  const Trial* best = history.incumbent();
  result.best = best != nullptr && std::isfinite(best->score)
                    ? apply_point(base, result.space, best->params)
                    : base;
  result.history = std::move(history);
  return result;
}

std::vector<BaseModelConfig> FrozenArtifacts::tuned_bases(
    const EvaluationConfig& cfg) const {
  std::vector<BaseModelConfig> out = cfg.bases;
  for (auto& b : out) {
    for (const auto& t : tuning) {
      if (t.algorithm == b.spec.algorithm) {
        b.spec.hyperparams = t.best.hyperparams;
        break;
      }
    }
    b.spec.seed = cfg.seed;
  }
  return out;
}

FrozenArtifacts prepare_artifacts(const RawTable& table, Date test_day,
                                  const EvaluationConfig& cfg) {
  const TuningWindow window = make_tuning_window(table, test_day, cfg);
  FrozenArtifacts out;
  out.subspace = select_features(window, cfg).subspace;
  out.tuning = tune_models(window, out.subspace, cfg);
  return out;
}

DayResult evaluate_day(const RawTable& table, Date day,
                       const FrozenArtifacts& artifacts,
                       const EvaluationConfig& cfg) {
  const auto train_rows = rows_matching(table, [&](Date d) { return d < day; });
  const auto hist_rows = rows_matching(table, [&](Date d) { return d <= day; });
  if (train_rows.empty()) {
    throw Error(ErrorCode::kNoTrainData, "no rows before " + day.to_string());
  }
  if (hist_rows.size() == train_rows.size()) {
    throw Error(ErrorCode::kDayAbsent, day.to_string() + " has no rows");
  }

  // The test day's labels are removed before anything downstream sees the
  // table; only `truth` below reads them.
  RawTable visible = table.select_rows(hist_rows);
  std::map<std::string, double> truth_by_entity;
  for (std::size_t r = 0; r < visible.rows(); ++r) {
    if (visible.dates[r] == day) {
      truth_by_entity[visible.entity_ids[r]] = visible.target[r].value_or(kNaN);
      visible.target[r].reset();
    }
  }

  DayResult out;
  out.day = day;
  out.variants = variant_names(cfg);
  out.pipeline = Pipeline::fit(table.select_rows(train_rows), cfg.preprocess);
  const FeatureMatrix full = out.pipeline->transform(visible);
  const auto columns = present_columns(full, artifacts.subspace);
  const FeatureMatrix reduced = full.select_columns(columns);
  const FeatureMatrix train =
      reduced.select_rows(matrix_rows(reduced, [&](Date d) { return d < day; }));
  const FeatureMatrix test =
      reduced.select_rows(matrix_rows(reduced, [&](Date d) { return d == day; }));

  out.keys = test.row_keys;
  out.truth.resize(test.rows());
  for (Eigen::Index i = 0; i < test.rows(); ++i) {
    out.truth(i) = truth_by_entity.at(test.row_keys[static_cast<std::size_t>(i)].entity_id);
  }
  const auto n_variants = static_cast<Eigen::Index>(out.variants.size());
  out.predictions = Eigen::MatrixXd::Constant(test.rows(), n_variants, kNaN);
  out.errors.assign(out.variants.size(), "");

  auto record = [&](std::size_t v, auto&& produce) {
    try {
      const Eigen::VectorXd p = produce();
      if (!p.allFinite()) {
        throw Error(ErrorCode::kNonFiniteInput, "non-finite prediction");
      }
      out.predictions.col(static_cast<Eigen::Index>(v)) = p;
    } catch (const std::exception& e) {
      out.errors[v] = describe(e);
    }
  };

  // Individual bases.
  const auto bases = artifacts.tuned_bases(cfg);
  std::vector<RegressorSpec> ok_specs;
  std::vector<RegressorModel> ok_models;
  std::vector<std::string> ok_names;
  std::vector<std::size_t> ok_columns;
  for (std::size_t b = 0; b < bases.size(); ++b) {
    record(b, [&] {
      RegressorModel m = fit(bases[b].spec, train);
      Eigen::VectorXd p = predict(m, test);
      ok_specs.push_back(bases[b].spec);
      ok_models.push_back(std::move(m));
      ok_names.push_back(bases[b].name);
      ok_columns.push_back(b);
      return p;
    });
  }
  // A base whose prediction turned out non-finite is excluded as well.
  for (std::size_t k = ok_columns.size(); k-- > 0;) {
    if (!out.errors[ok_columns[k]].empty()) {
      ok_specs.erase(ok_specs.begin() + static_cast<std::ptrdiff_t>(k));
      ok_models.erase(ok_models.begin() + static_cast<std::ptrdiff_t>(k));
      ok_names.erase(ok_names.begin() + static_cast<std::ptrdiff_t>(k));
      ok_columns.erase(ok_columns.begin() + static_cast<std::ptrdiff_t>(k));
    }
  }
  PredictionMatrix base_preds;
  base_preds.values.resize(test.rows(), static_cast<Eigen::Index>(ok_columns.size()));
  for (std::size_t k = 0; k < ok_columns.size(); ++k) {
    base_preds.values.col(static_cast<Eigen::Index>(k)) =
        out.predictions.col(static_cast<Eigen::Index>(ok_columns[k]));
  }
  base_preds.model_names = ok_names;
  out.bases = ok_models;
  out.base_names = ok_names;

  const std::size_t avg = bases.size();
  record(avg, [&] { return ensemble_average(base_preds); });

  std::optional<Level0> level0;
  std::string level0_error;
  try {
    level0 = fit_level0(ok_specs, train, cfg.folds, ok_models);
  } catch (const std::exception& e) {
    level0_error = "level-0 predictions unavailable: " + describe(e);
  }

  record(avg + 1, [&]() -> Eigen::VectorXd {
    if (!level0) throw Error(ErrorCode::kTooFewModels, level0_error);
    out.weights = normalize_weights(level0->oof_scores(train.target));
    out.weight_names = ok_names;
    return ensemble_weighted(base_preds, out.weights);
  });

  const std::size_t first_meta = avg + 2;
  const std::size_t n_meta = cfg.metas.size();
  for (std::size_t m = 0; m < n_meta; ++m) {
    for (StackMode mode : {StackMode::kStack, StackMode::kBlend}) {
      const std::size_t v =
          first_meta + m + (mode == StackMode::kBlend ? n_meta : 0);
      record(v, [&]() -> Eigen::VectorXd {
        if (!level0) throw Error(ErrorCode::kTooFewModels, level0_error);
        const RegressorSpec meta{cfg.metas[m], {}, cfg.seed};
        StackModel model = fit_meta(*level0, meta, train, mode, columns);
        Eigen::VectorXd p = stack_predict(model, test, base_preds);
        out.ensembles.emplace_back(out.variants[v], std::move(model));
        return p;
      });
    }
  }

  out.r2.assign(out.variants.size(), kNaN);
  for (std::size_t v = 0; v < out.variants.size(); ++v) {
    if (!out.errors[v].empty()) continue;
    try {
      out.r2[v] =
          r2_score(out.truth, out.predictions.col(static_cast<Eigen::Index>(v))).r2;
    } catch (const std::exception& e) {
      out.errors[v] = describe(e);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Artifact serialization

void to_json(nlohmann::json& j, const TuningResult& result) {
  nlohmann::json trials = nlohmann::json::array();
  for (std::size_t i = 0; i < result.history.trials.size(); ++i) {
    trials.push_back(trial_to_json(result.history.trials[i], i, result.space));
  }
  j = nlohmann::json{{"algorithm", to_string(result.algorithm)},
                     {"space", result.space},
                     {"best", result.best},
                     {"trials", std::move(trials)}};
}

void from_json(const nlohmann::json& j, TuningResult& result) {
  detail::require_object(j, "tuning result",
                         {"algorithm", "space", "best", "trials"});
  TuningResult out;
  out.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  out.space = j.at("space").get<ParamSpace>();
  out.best = j.at("best").get<RegressorSpec>();
  for (const auto& t : j.value("trials", nlohmann::json::array())) {
    Trial trial;
    for (const auto& dim : out.space.dims) {
      trial.params.push_back(t.at("params").at(dim.name).get<double>());
    }
    const auto& score = t.at("score");
    trial.score = score.is_number() ? score.get<double>()
                                    : -std::numeric_limits<double>::infinity();
    trial.timestamp = t.value("timestamp", std::string());
    out.history.add(std::move(trial));
  }
  result = std::move(out);
}

nlohmann::json artifacts_to_json(const FrozenArtifacts& artifacts) {
  return {{"subspace", artifacts.subspace}, {"tuning", artifacts.tuning}};
}

FrozenArtifacts artifacts_from_json(const nlohmann::json& j) {
  detail::require_object(j, "artifacts", {"subspace", "tuning"});
  FrozenArtifacts out;
  out.subspace = j.at("subspace").get<FeatureSubspace>();
  out.tuning = j.at("tuning").get<std::vector<TuningResult>>();
  return out;
}

// ---------------------------------------------------------------------------
// Rolling protocol

EvaluationReport rolling_evaluate(const RawTable& table,
                                  const EvaluationConfig& cfg,
                                  const FrozenArtifacts* frozen,
                                  const DayCallback& on_day) {
  cfg.validate();
  table.validate();
  const std::vector<Date> days = plan_test_days(table, cfg);

  FrozenArtifacts artifacts;
  if (frozen != nullptr && !cfg.refresh_daily) {
    artifacts = *frozen;
  } else {
    artifacts = prepare_artifacts(table, days.front(), cfg);
  }

  EvaluationReport report;
  report.variants = variant_names(cfg);
  nlohmann::json tuned = nlohmann::json::object();
  for (const auto& t : artifacts.tuning) {
    tuned[std::string(to_string(t.algorithm))] = t.best.hyperparams;
  }
  report.manifest = {
      {"seed", cfg.seed},
      {"config_hash", hex64(fnv1a64(nlohmann::json(cfg).dump()))},
      {"table_rows", table.rows()},
      {"features", artifacts.subspace.features},
      {"selection",
       {{"validation_r2", artifacts.subspace.validation_r2},
        {"iterations", artifacts.subspace.iterations},
        {"below_zero_at_first", artifacts.subspace.below_zero_at_first}}},
      {"tuned_params", tuned},
      {"refresh_daily", cfg.refresh_daily}};

  for (const Date day : days) {
    if (cfg.refresh_daily && day != days.front()) {
      artifacts = prepare_artifacts(table, day, cfg);
    }
    const DayResult result = evaluate_day(table, day, artifacts, cfg);
    report.test_days.push_back(day.to_string());
    std::vector<ReportCell> row;
    for (std::size_t v = 0; v < result.variants.size(); ++v) {
      row.push_back({result.errors[v].empty() ? result.r2[v] : kNaN,
                     result.errors[v]});
    }
    report.cells.push_back(std::move(row));
    if (on_day) on_day(result);
  }
  return report;
}

}  // namespace clickstack
