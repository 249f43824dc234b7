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

#include "run.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace clickstack::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Small file helpers

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << text;
  if (!out.flush()) {
    throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  }
}

std::string utc_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string hash_of(std::initializer_list<std::string> parts) {
  std::string joined;
  for (const auto& p : parts) {
    joined += p;
    joined.push_back('\x1f');
  }
  return hex64(fnv1a64(joined));
}

// ---------------------------------------------------------------------------
// Config loading

int line_at(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(),
                                         text.begin() + static_cast<std::ptrdiff_t>(byte),
                                         '\n'));
}

// Line of the first `"key"` at or after `from`; 0 when absent.
int line_of_key(const std::string& text, std::string_view key,
                std::size_t from = 0) {
  const std::string needle = "\"" + std::string(key) + "\"";
  const auto pos = text.find(needle, from);
  return pos == std::string::npos ? 0 : line_at(text, pos);
}

// Best line for a validation message about `section`: the first quoted
// token of the message if it occurs inside the section, else the section's
// own key.
int locate(const std::string& text, std::string_view section,
           const std::string& message) {
  const auto section_pos = text.find("\"" + std::string(section) + "\"");
  const std::size_t from = section_pos == std::string::npos ? 0 : section_pos;
  const auto open = message.find('\'');
  if (open != std::string::npos) {
    const auto close = message.find('\'', open + 1);
    if (close != std::string::npos) {
      const int line =
          line_of_key(text, message.substr(open + 1, close - open - 1), from);
      if (line > 0) return line;
    }
  }
  return section_pos == std::string::npos ? 1 : line_at(text, section_pos);
}

fs::path resolve(const fs::path& base_dir, const fs::path& p) {
  return p.is_absolute() ? p : base_dir / p;
}

RunConfig default_config(const CommandLine& flags) {
  RunConfig cfg;
  cfg.synthetic = SyntheticConfig{};
  cfg.schema = synthetic_schema();
  cfg.seed = flags.seed;
  if (flags.out) cfg.output_dir = *flags.out;
  return cfg;
}

void apply_seed(RunConfig& cfg) {
  if (!cfg.seed) return;
  cfg.evaluation.seed = *cfg.seed;
  if (cfg.synthetic) cfg.synthetic->seed = *cfg.seed;
}

// ---------------------------------------------------------------------------
// Output directory layout and lock

struct Paths {
  explicit Paths(const fs::path& root)
      : out(root),
        data(root / "data.csv"),
        pipeline(root / "pipeline.json"),
        subspace(root / "subspace.json"),
        trials(root / "trials"),
        models(root / "models"),
        predictions(root / "predictions.csv"),
        report_json(root / "report.json"),
        report_csv(root / "report.csv"),
        report_md(root / "report.md"),
        manifest(root / "run_manifest.json"),
        lock(root / ".clickstack.lock") {}

  fs::path out, data, pipeline, subspace, trials, models, predictions,
      report_json, report_csv, report_md, manifest, lock;
};

class RunLock {
 public:
  explicit RunLock(fs::path path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      if (errno == EEXIST) {
        throw Error(ErrorCode::kIoFailure,
                    "output directory is locked by another run (delete " +
                        path_.string() + " if that run is gone)");
      }
      throw Error(ErrorCode::kIoFailure, "cannot create lock " +
                                             path_.string() + ": " +
                                             std::strerror(errno));
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] const auto n = ::write(fd_, pid.data(), pid.size());
  }
  ~RunLock() {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

// A failure inside a named pipeline stage.
struct StageFailure : std::runtime_error {
  StageFailure(const std::string& stage, const std::string& what)
      : std::runtime_error("stage '" + stage + "' failed: " + what) {}
};

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw StageFailure(name, e.what());
  }
}

// ---------------------------------------------------------------------------
// Pipeline context shared by the subcommands

class Runner {
 public:
  Runner(RunConfig cfg, std::string command, std::ostream& log)
      : cfg_(std::move(cfg)),
        command_(std::move(command)),
        paths_(cfg_.output_dir),
        log_(log) {
    if (fs::exists(paths_.manifest)) {
      try {
        manifest_ = json::parse(read_file(paths_.manifest));
      } catch (const std::exception&) {
        manifest_ = json::object();
      }
    }
    if (!manifest_.is_object()) manifest_ = json::object();
    if (!manifest_.contains("stages")) manifest_["stages"] = json::object();
  }

  void generate() {
    stage("generate", [&] {
      if (!cfg_.synthetic) {
        throw Error(ErrorCode::kInvalidConfig,
                    "generate needs a synthetic section in the config");
      }
      load_data();
    });
    say("generate", "wrote " + paths_.data.string() + " (" +
                        std::to_string(table_.rows()) + " rows)");
    finish();
  }

  void preprocess() {
    stage("load", [&] { load_data(); });
    stage("preprocess", [&] { write_first_pipeline(); });
    finish();
  }

  void select_features() {
    stage("load", [&] { load_data(); });
    stage("select-features", [&] { ensure_subspace(); });
    finish();
  }

  void tune() {
    stage("load", [&] { load_data(); });
    stage("select-features", [&] { ensure_subspace(); });
    stage("tune", [&] { ensure_tuning(); });
    finish();
  }

  void evaluate() {
    stage("load", [&] { load_data(); });
    const auto& ev = cfg_.evaluation;
    if (!ev.refresh_daily) {
      stage("select-features", [&] { ensure_subspace(); });
      stage("tune", [&] { ensure_tuning(); });
    }
    const EvaluationReport report = stage("evaluate", [&] { run_rolling(); return report_; });
    stage("report", [&] { write_report(report); });
    const auto summary = report.summary();
    for (std::size_t i = 0; i < std::min<std::size_t>(5, summary.size()); ++i) {
      say("report", summary[i].variant + " mean R2 " +
                        format_real(summary[i].mean_r2));
    }
    finish();
  }

  void report() {
    const EvaluationReport report = stage("report", [&] {
      return report_from_json(json::parse(read_file(paths_.report_json)));
    });
    stage("report", [&] { write_report(report); });
    finish();
  }

 private:
  void say(const std::string& stage_name, const std::string& msg) {
    log_ << "[" << stage_name << "] " << msg << "\n";
  }

  void artifact(const fs::path& p) {
    artifacts_.insert(fs::relative(p, paths_.out).generic_string());
  }

  void load_data() {
    if (cfg_.synthetic) {
      table_ = generate_synthetic(*cfg_.synthetic);
      write_table(table_, paths_.data);
      artifact(paths_.data);
      data_hash_ = hex64(fnv1a64(read_file(paths_.data)));
      data_source_ = "synthetic";
    } else {
      LoadDiagnostics diag;
      table_ = load_table(*cfg_.input, cfg_.schema, &diag);
      data_hash_ = hex64(fnv1a64(read_file(*cfg_.input)));
      data_source_ = cfg_.input->string();
      if (diag.dropped_unlabeled_rows > 0) {
        say("load", "dropped " + std::to_string(diag.dropped_unlabeled_rows) +
                        " rows without a target");
      }
    }
    manifest_["data"] = {{"source", data_source_},
                         {"hash", data_hash_},
                         {"rows", table_.rows()}};
  }

  std::vector<Date> test_days() {
    if (days_.empty()) days_ = plan_test_days(table_, cfg_.evaluation);
    return days_;
  }

  const TuningWindow& window() {
    if (!window_) window_ = make_tuning_window(table_, test_days().front(), cfg_.evaluation);
    return *window_;
  }

  std::string preprocess_hash() {
    const auto& ev = cfg_.evaluation;
    return hash_of({data_hash_, json(ev.preprocess).dump(),
                    std::to_string(ev.validation_days),
                    ev.first_test_day ? ev.first_test_day->to_string() : "",
                    std::to_string(ev.test_days),
                    std::to_string(ev.min_train_days)});
  }

  std::string selection_hash() {
    const auto& ev = cfg_.evaluation;
    return hash_of({preprocess_hash(), ev.select_features ? "1" : "0",
                    json(ev.selection_model).dump(), std::to_string(ev.seed)});
  }

  std::string tuning_hash() {
    const auto& ev = cfg_.evaluation;
    json j = ev;
    return hash_of({selection_hash(), j.at("tuning").dump(),
                    j.at("bases").dump()});
  }

  void write_first_pipeline() {
    const Date first = test_days().front();
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < table_.rows(); ++r) {
      if (table_.dates[r] < first) rows.push_back(r);
    }
    const Pipeline p = Pipeline::fit(table_.select_rows(rows),
                                     cfg_.evaluation.preprocess);
    write_pipeline(p);
  }

  void write_pipeline(const Pipeline& p) {
    write_file(paths_.pipeline, p.to_json().dump(2) + "\n");
    artifact(paths_.pipeline);
    manifest_["stages"]["preprocess"] = {
        {"hash", preprocess_hash()},
        {"columns", p.feature_names().size()}};
    say("preprocess", "pipeline with " +
                          std::to_string(p.feature_names().size()) +
                          " columns -> " + paths_.pipeline.string());
  }

  void ensure_subspace() {
    const std::string hash = selection_hash();
    if (fs::exists(paths_.subspace)) {
      try {
        const json j = json::parse(read_file(paths_.subspace));
        if (j.value("config_hash", "") == hash) {
          subspace_ = j.get<FeatureSubspace>();
          artifact(paths_.subspace);
          say("select-features", "reusing " + paths_.subspace.string());
          record_subspace(hash);
          return;
        }
      } catch (const std::exception&) {
        // Unreadable or foreign file: recompute below.
      }
    }
    const SelectionResult sel =
        clickstack::select_features(window(), cfg_.evaluation);
    subspace_ = sel.subspace;
    json j = *subspace_;
    j["config_hash"] = hash;
    json ranking = json::array();
    for (const auto& r : sel.ranking.entries) {
      ranking.push_back({{"name", r.name}, {"importance", r.importance}});
    }
    j["ranking"] = std::move(ranking);
    write_file(paths_.subspace, j.dump(2) + "\n");
    artifact(paths_.subspace);
    say("select-features", std::to_string(subspace_->features.size()) +
                               " of " + std::to_string(sel.ranking.size()) +
                               " features kept, validation R2 " +
                               format_real(subspace_->validation_r2));
    record_subspace(hash);
  }

  void record_subspace(const std::string& hash) {
    manifest_["stages"]["select-features"] = {
        {"hash", hash}, {"features", subspace_->features}};
  }

  fs::path trace_path(Algorithm a) const {
    return paths_.trials / (std::string(to_string(a)) + ".jsonl");
  }

  std::optional<std::vector<TuningResult>> reuse_tuning(const std::string& hash) {
    const auto& stages = manifest_["stages"];
    if (!stages.contains("tune") || stages["tune"].value("hash", "") != hash) {
      return std::nullopt;
    }
    std::vector<TuningResult> out;
    for (Algorithm a : cfg_.evaluation.tuning.algorithms) {
      const fs::path path = trace_path(a);
      if (!fs::exists(path)) return std::nullopt;
      const ParamSpace space = cfg_.evaluation.tuning.space_for(a);
      TrialHistory history;
      std::istringstream lines(read_file(path));
      std::string line;
      while (std::getline(lines, line)) {
        if (line.empty()) continue;
        const json t = json::parse(line);
        Trial trial;
        for (const auto& dim : space.dims) {
          trial.params.push_back(t.at("params").at(dim.name).get<double>());
        }
        const auto& score = t.at("score");
        trial.score = score.is_number()
                          ? score.get<double>()
                          : -std::numeric_limits<double>::infinity();
        trial.timestamp = t.value("timestamp", "");
        history.add(std::move(trial));
      }
      if (static_cast<int>(history.size()) != cfg_.evaluation.tuning.budget) {
        return std::nullopt;
      }
      out.push_back(finish_tuning(cfg_.evaluation, a, std::move(history)));
    }
    return out;
  }

  void ensure_tuning() {
    const std::string hash = tuning_hash();
    if (auto reused = reuse_tuning(hash)) {
      tuning_ = std::move(*reused);
      for (const auto& t : *tuning_) artifact(trace_path(t.algorithm));
      say("tune", "reusing trial traces in " + paths_.trials.string());
      record_tuning(hash);
      return;
    }
    fs::create_directories(paths_.trials);
    std::map<Algorithm, std::ofstream> traces;
    for (Algorithm a : cfg_.evaluation.tuning.algorithms) {
      traces[a].open(trace_path(a), std::ios::binary | std::ios::trunc);
      if (!traces[a]) {
        throw Error(ErrorCode::kIoFailure, "cannot write " + trace_path(a).string());
      }
    }
    const auto observer = [&](Algorithm a, const Trial& t, std::size_t i) {
      const ParamSpace space = cfg_.evaluation.tuning.space_for(a);
      traces[a] << trial_to_json(t, i, space).dump() << "\n";
      traces[a].flush();
    };
    tuning_ = tune_models(window(), *subspace_, cfg_.evaluation, observer);
    for (const auto& t : *tuning_) {
      artifact(trace_path(t.algorithm));
      const Trial* best = t.history.incumbent();
      say("tune", std::string(to_string(t.algorithm)) + ": best validation R2 " +
                      (best ? format_real(best->score) : std::string("n/a")) +
                      " after " + std::to_string(t.history.size()) + " trials");
    }
    record_tuning(hash);
  }

  void record_tuning(const std::string& hash) {
    json best = json::object();
    for (const auto& t : *tuning_) {
      best[std::string(to_string(t.algorithm))] = t.best.hyperparams;
    }
    manifest_["stages"]["tune"] = {{"hash", hash}, {"best_params", best}};
  }

  void write_models(const DayResult& day) {
    fs::create_directories(paths_.models);
    for (std::size_t b = 0; b < day.bases.size(); ++b) {
      json j = model_to_json(day.bases[b]);
      j["name"] = day.base_names[b];
      const fs::path p = paths_.models / (day.base_names[b] + ".json");
      write_file(p, j.dump(2) + "\n");
      artifact(p);
    }
    for (const auto& [variant, model] : day.ensembles) {
      json bases = json::array();
      for (std::size_t b = 0; b < model.bases.size(); ++b) {
        bases.push_back({{"name", day.base_names[b]},
                         {"file", day.base_names[b] + ".json"}});
      }
      json j = {{"format", "clickstack.ensemble"},
                {"version", 1},
                {"variant", variant},
                {"mode", to_string(model.mode)},
                {"trained_through", (day.day - 1).to_string()},
                {"bases", std::move(bases)},
                {"meta", model_to_json(model.meta)},
                {"reduced_features", model.reduced_features},
                {"input_columns", model.input_columns}};
      const fs::path p = paths_.models / (variant + ".json");
      write_file(p, j.dump(2) + "\n");
      artifact(p);
    }
  }

  void run_rolling() {
    const auto days = test_days();
    std::optional<FrozenArtifacts> frozen;
    if (!cfg_.evaluation.refresh_daily) {
      frozen = FrozenArtifacts{*subspace_, *tuning_};
    }
    std::ofstream preds(paths_.predictions, std::ios::binary | std::ios::trunc);
    if (!preds) {
      throw Error(ErrorCode::kIoFailure, "cannot write " + paths_.predictions.string());
    }
    preds << "day,entity_id,variant,prediction\n";
    artifact(paths_.predictions);

    const auto on_day = [&](const DayResult& day) {
      for (std::size_t r = 0; r < day.keys.size(); ++r) {
        for (std::size_t v = 0; v < day.variants.size(); ++v) {
          const double p = day.predictions(static_cast<Eigen::Index>(r),
                                           static_cast<Eigen::Index>(v));
          preds << day.day.to_string() << ',' << day.keys[r].entity_id << ','
                << day.variants[v] << ','
                << (std::isfinite(p) ? format_real(p) : std::string()) << '\n';
        }
      }
      if (day.day == days.front() && day.pipeline) write_pipeline(*day.pipeline);
      if (day.day == days.back()) write_models(day);
      std::size_t failed = 0;
      double best = -std::numeric_limits<double>::infinity();
      std::string best_name;
      for (std::size_t v = 0; v < day.variants.size(); ++v) {
        if (!day.errors[v].empty()) {
          ++failed;
        } else if (day.r2[v] > best) {
          best = day.r2[v];
          best_name = day.variants[v];
        }
      }
      say("evaluate", day.day.to_string() + ": best " + best_name + " R2 " +
                          format_real(best) +
                          (failed ? ", " + std::to_string(failed) + " failed" : ""));
    };
    report_ = rolling_evaluate(table_, cfg_.evaluation,
                               frozen ? &*frozen : nullptr, on_day);
    if (!preds.flush()) {
      throw Error(ErrorCode::kIoFailure, "cannot write " + paths_.predictions.string());
    }
    manifest_["stages"]["evaluate"] = {
        {"test_days", report_.test_days},
        {"variants", report_.variants.size()},
        {"config_hash", report_.manifest.value("config_hash", "")}};
  }

  void write_report(const EvaluationReport& report) {
    render_report(report, ReportFormat::kJson, paths_.report_json);
    render_report(report, ReportFormat::kCsv, paths_.report_csv);
    render_report(report, ReportFormat::kMarkdown, paths_.report_md);
    artifact(paths_.report_json);
    artifact(paths_.report_csv);
    artifact(paths_.report_md);
    say("report", "wrote report.{json,csv,md} to " + paths_.out.string());
  }

  void finish() {
    manifest_["tool"] = "clickstack";
    manifest_["version"] = kVersion;
    manifest_["command"] = command_;
    manifest_["created"] = utc_now();
    manifest_["seed"] = cfg_.evaluation.seed;
    manifest_["evaluation_config"] = cfg_.evaluation;
    manifest_["config_hash"] = hex64(fnv1a64(json(cfg_.evaluation).dump()));
    if (cfg_.synthetic) manifest_["synthetic_config"] = *cfg_.synthetic;
    std::set<std::string> all = artifacts_;
    if (manifest_.contains("artifacts") && manifest_["artifacts"].is_array()) {
      for (const auto& a : manifest_["artifacts"]) all.insert(a.get<std::string>());
    }
    all.insert("run_manifest.json");
    manifest_["artifacts"] = all;
    write_file(paths_.manifest, manifest_.dump(2) + "\n");
  }

  RunConfig cfg_;
  std::string command_;
  Paths paths_;
  std::ostream& log_;
  json manifest_ = json::object();
  std::set<std::string> artifacts_;

  RawTable table_;
  std::string data_hash_;
  std::string data_source_;
  std::vector<Date> days_;
  std::optional<TuningWindow> window_;
  std::optional<FeatureSubspace> subspace_;
  std::optional<std::vector<TuningResult>> tuning_;
  EvaluationReport report_;
};

const std::set<std::string>& commands() {
  static const std::set<std::string> names{
      "generate", "preprocess", "select-features", "tune", "evaluate", "report"};
  return names;
}

}  // namespace

ConfigError::ConfigError(const fs::path& file, int line,
                         const std::string& message)
    : std::runtime_error(file.string() +
                         (line > 0 ? ":" + std::to_string(line) : "") + ": " +
                         message),
      line_(line) {}

RunConfig load_run_config(const fs::path& file, const CommandLine& flags) {
  std::string text;
  try {
    text = read_file(file);
  } catch (const Error& e) {
    throw ConfigError(file, 0, e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(file, line_at(text, e.byte), e.what());
  }
  if (!j.is_object()) throw ConfigError(file, 1, "config must be a JSON object");

  static const std::set<std::string> allowed{
      "input", "synthetic", "schema", "output_dir", "evaluation", "seed"};
  for (const auto& item : j.items()) {
    if (!allowed.contains(item.key())) {
      throw ConfigError(file, line_of_key(text, item.key()),
                        "unknown key '" + item.key() + "'");
    }
  }

  const fs::path dir = file.parent_path();
  RunConfig cfg;
  auto section = [&](const char* key, auto&& parse) {
    if (!j.contains(key)) return;
    try {
      parse(j.at(key));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(file, locate(text, key, e.what()),
                        std::string(key) + ": " + e.what());
    }
  };
  section("input", [&](const json& v) { cfg.input = resolve(dir, v.get<std::string>()); });
  section("synthetic", [&](const json& v) { cfg.synthetic = v.get<SyntheticConfig>(); });
  section("schema", [&](const json& v) {
    if (!v.is_object()) throw Error(ErrorCode::kInvalidConfig, "must be an object");
    for (const auto& item : v.items()) {
      static const std::set<std::string> keys{"entity_column", "date_column",
                                              "target_column", "categorical_columns"};
      if (!keys.contains(item.key())) {
        throw Error(ErrorCode::kInvalidConfig, "unknown key '" + item.key() + "'");
      }
    }
    cfg.schema.entity_column = v.value("entity_column", cfg.schema.entity_column);
    cfg.schema.date_column = v.value("date_column", cfg.schema.date_column);
    cfg.schema.target_column = v.value("target_column", cfg.schema.target_column);
    cfg.schema.categorical_columns =
        v.value("categorical_columns", cfg.schema.categorical_columns);
  });
  section("output_dir", [&](const json& v) {
    cfg.output_dir = resolve(dir, v.get<std::string>());
  });
  section("evaluation", [&](const json& v) { cfg.evaluation = v.get<EvaluationConfig>(); });
  section("seed", [&](const json& v) { cfg.seed = v.get<std::uint64_t>(); });

  if (cfg.input && cfg.synthetic) {
    throw ConfigError(file, line_of_key(text, "synthetic"),
                      "set either 'input' or 'synthetic', not both");
  }
  if (!cfg.input && !cfg.synthetic) {
    throw ConfigError(file, 1, "one of 'input' or 'synthetic' is required");
  }
  if (cfg.input && !fs::is_regular_file(*cfg.input)) {
    throw ConfigError(file, line_of_key(text, "input"),
                      "input file '" + cfg.input->string() + "' does not exist");
  }
  if (cfg.synthetic && !j.contains("schema")) cfg.schema = synthetic_schema();
  if (flags.seed) cfg.seed = flags.seed;
  if (flags.out) cfg.output_dir = *flags.out;
  if (cfg.output_dir.empty()) {
    throw ConfigError(file, 0, "no output directory: pass --out or set 'output_dir'");
  }
  apply_seed(cfg);
  return cfg;
}

int run_command(const CommandLine& cmd, std::ostream& out, std::ostream& err) {
  if (!commands().contains(cmd.command)) {
    err << "error: unknown command '" << cmd.command << "'\n";
    return 2;
  }
  RunConfig cfg;
  try {
    if (cmd.command == "report") {
      if (!cmd.out) throw ConfigError("report", 0, "report needs --out");
      cfg.output_dir = *cmd.out;
      if (!fs::exists(cfg.output_dir / "report.json")) {
        throw ConfigError(cfg.output_dir / "report.json", 0,
                          "no report to render");
      }
    } else if (cmd.config) {
      cfg = load_run_config(*cmd.config, cmd);
    } else {
      cfg = default_config(cmd);
      if (cfg.output_dir.empty()) {
        throw ConfigError("command line", 0, "pass --out or --config");
      }
      apply_seed(cfg);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    fs::create_directories(cfg.output_dir);
    RunLock lock(cfg.output_dir / ".clickstack.lock");
    Runner runner(std::move(cfg), cmd.command, out);
    if (cmd.command == "generate") runner.generate();
    if (cmd.command == "preprocess") runner.preprocess();
    if (cmd.command == "select-features") runner.select_features();
    if (cmd.command == "tune") runner.tune();
    if (cmd.command == "evaluate") runner.evaluate();
    if (cmd.command == "report") runner.report();
  } catch (const StageFailure& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run_command(int argc, const char* const* argv, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"clickstack: click-prediction regression toolkit", "clickstack"};
  app.fallthrough();
  app.require_subcommand(1, 1);

  std::string config, out_dir;
  std::uint64_t seed = 0;
  auto* config_opt = app.add_option("--config", config, "JSON run config");
  auto* seed_opt = app.add_option("--seed", seed, "Global seed (overrides config)");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory");

  app.add_subcommand("generate", "Write a synthetic table to <out>/data.csv");
  app.add_subcommand("preprocess", "Fit the preprocessing pipeline");
  app.add_subcommand("select-features", "Rank and select features");
  app.add_subcommand("tune", "Bayesian hyperparameter tuning");
  app.add_subcommand("evaluate", "Full rolling evaluation");
  app.add_subcommand("report", "Re-render an existing report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }

  CommandLine cmd;
  cmd.command = app.get_subcommands().front()->get_name();
  if (config_opt->count() > 0) cmd.config = config;
  if (seed_opt->count() > 0) cmd.seed = seed;
  if (out_opt->count() > 0) cmd.out = out_dir;
  return run_command(cmd, out, err);
}

}  // namespace clickstack::app
