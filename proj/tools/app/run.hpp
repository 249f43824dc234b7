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

#ifndef CLICKSTACK_TOOLS_RUN_HPP
#define CLICKSTACK_TOOLS_RUN_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "clickstack/dataset.hpp"
#include "clickstack/evaluate.hpp"

namespace clickstack::app {

/// Invalid run configuration, pointing at the offending line of the file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::filesystem::path& file, int line,
              const std::string& message);

  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct RunConfig {
  // Exactly one data source.
  std::optional<std::filesystem::path> input;
  std::optional<SyntheticConfig> synthetic;
  TableSchema schema;
  std::filesystem::path output_dir;
  EvaluationConfig evaluation;
  // When set, overrides both the evaluation and the synthetic seed.
  std::optional<std::uint64_t> seed;
};

struct CommandLine {
  std::string command;
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

/// Parses and validates a JSON run config; relative paths resolve against
/// the file's directory. Command-line flags take precedence over config
/// values. Throws ConfigError.
RunConfig load_run_config(const std::filesystem::path& file,
                          const CommandLine& flags);

/// Executes one subcommand. Returns 0 on success, 2 for configuration or
/// usage errors (nothing is written), 1 for runtime failures.
int run_command(const CommandLine& cmd, std::ostream& out, std::ostream& err);

/// argv front end: `clickstack <generate|preprocess|select-features|tune|
/// evaluate|report> [--config PATH] [--seed N] [--out DIR]`.
int run_command(int argc, const char* const* argv, std::ostream& out,
                std::ostream& err);

}  // namespace clickstack::app

#endif  // CLICKSTACK_TOOLS_RUN_HPP
