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


#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "run.hpp"
#include "test_util.hpp"

namespace clickstack::app {
namespace {

namespace fs = std::filesystem;
using testing::read_text;
using testing::scratch_dir;
using testing::write_text;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "clickstack");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_command(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const char* kSmallRun = R"({
  "synthetic": {"n_entities": 6, "n_days": 42, "seed": 3},
  "evaluation": {
    "test_days": 2,
    "min_train_days": 30,
    "tuning": {"budget": 6, "models": ["sgd_linear"], "candidates": 64},
    "metas": ["ols", "bayesian_ridge"]
  }
})";

fs::path small_config(const fs::path& dir) {
  write_text(dir / "run.json", kSmallRun);
  return dir / "run.json";
}

TEST(CliTest, GenerateIsDeterministic) {
  const auto dir = scratch_dir("cli_generate");
  const auto cfg = small_config(dir);
  ASSERT_EQ(run({"generate", "--config", cfg.string(), "--out",
                 (dir / "a").string()}).code, 0);
  ASSERT_EQ(run({"generate", "--config", cfg.string(), "--out",
                 (dir / "b").string()}).code, 0);
  const std::string a = read_text(dir / "a" / "data.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, read_text(dir / "b" / "data.csv"));
  ASSERT_EQ(run({"generate", "--config", cfg.string(), "--seed", "99", "--out",
                 (dir / "c").string()}).code, 0);
  EXPECT_NE(a, read_text(dir / "c" / "data.csv"));
}

TEST(CliTest, MissingInputFileIsAConfigError) {
  const auto dir = scratch_dir("cli_missing_input");
  write_text(dir / "run.json",
             "{\n  \"input\": \"nowhere.csv\",\n  \"output_dir\": \"out\"\n}\n");
  const Outcome r = run({"evaluate", "--config", (dir / "run.json").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("run.json:2:"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(CliTest, ParseErrorReportsLine) {
  const auto dir = scratch_dir("cli_parse_error");
  write_text(dir / "run.json", "{\n  \"synthetic\": {},\n  \"seed\": ,\n}\n");
  const Outcome r = run({"evaluate", "--config", (dir / "run.json").string(),
                         "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("run.json:3:"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(CliTest, UnknownKeyAndBadValueReportLines) {
  const auto dir = scratch_dir("cli_bad_key");
  write_text(dir / "a.json", "{\n  \"synthetic\": {},\n  \"colour\": 1\n}\n");
  Outcome r = run({"evaluate", "--config", (dir / "a.json").string(), "--out",
                   (dir / "out").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("a.json:3:"), std::string::npos) << r.err;

  write_text(dir / "b.json",
             "{\n  \"synthetic\": {},\n  \"evaluation\": {\n"
             "    \"metas\": [\"huber\"]\n  }\n}\n");
  r = run({"evaluate", "--config", (dir / "b.json").string(), "--out",
           (dir / "out").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("b.json:"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(CliTest, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"dance"}).code, 2);
  EXPECT_EQ(run({"evaluate", "--bogus"}).code, 2);
  EXPECT_EQ(run({"report"}).code, 2);
}

TEST(CliTest, EvaluateWritesArtifactsAndReportRerenders) {
  const auto dir = scratch_dir("cli_evaluate");
  const auto out = dir / "out";
  const Outcome r = run({"evaluate", "--config", small_config(dir).string(),
                         "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"data.csv", "pipeline.json", "subspace.json",
                        "trials/sgd_linear.jsonl", "models/ridge.json",
                        "models/stack_ols.json", "report.json", "report.csv",
                        "report.md", "run_manifest.json", "predictions.csv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  EXPECT_FALSE(fs::exists(out / ".clickstack.lock"));

  const auto report = nlohmann::json::parse(read_text(out / "report.json"));
  EXPECT_EQ(report.at("days").size(), 2u);
  EXPECT_EQ(report.at("variants").size(), 10u + 2u + 4u);

  std::size_t lines = 0;
  for (char c : read_text(out / "trials/sgd_linear.jsonl")) lines += c == '\n';
  EXPECT_EQ(lines, 6u);

  const std::string md = read_text(out / "report.md");
  const std::string csv = read_text(out / "report.csv");
  fs::remove(out / "report.md");
  fs::remove(out / "report.csv");
  ASSERT_EQ(run({"report", "--out", out.string()}).code, 0);
  EXPECT_EQ(read_text(out / "report.md"), md);
  EXPECT_EQ(read_text(out / "report.csv"), csv);
}

TEST(CliTest, StagesRunIndividually) {
  const auto dir = scratch_dir("cli_stages");
  const auto cfg = small_config(dir);
  const auto out = (dir / "out").string();
  for (const char* stage : {"preprocess", "select-features", "tune"}) {
    const Outcome r = run({stage, "--config", cfg.string(), "--out", out});
    EXPECT_EQ(r.code, 0) << stage << ": " << r.err;
  }
  EXPECT_TRUE(fs::exists(dir / "out" / "pipeline.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "subspace.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "trials" / "sgd_linear.jsonl"));
}

TEST(CliTest, LockedOutputDirectoryFails) {
  const auto dir = scratch_dir("cli_lock");
  fs::create_directories(dir / "out");
  write_text(dir / "out" / ".clickstack.lock", "12345\n");
  const Outcome r = run({"generate", "--config", small_config(dir).string(),
                         "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("locked"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out" / "data.csv"));
}

TEST(CliTest, RuntimeFailureNamesTheStage) {
  const auto dir = scratch_dir("cli_runtime");
  write_text(dir / "run.json",
             R"({"synthetic": {"n_entities": 3, "n_days": 12},
                 "evaluation": {"test_days": 11, "min_train_days": 10}})");
  const Outcome r = run({"evaluate", "--config", (dir / "run.json").string(),
                         "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("stage '"), std::string::npos) << r.err;
}

}  // namespace
}  // namespace clickstack::app
