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

#ifndef CLICKSTACK_COMMON_HPP
#define CLICKSTACK_COMMON_HPP

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace clickstack {

enum class ErrorCode {
  kMissingColumn,
  kDuplicateKey,
  kEmptyTable,
  kInvalidConfig,
  kNoTrainData,
  kDayAbsent,
  kAllMissingColumn,
  kSeriesTooShort,
  kNonFiniteInput,
  kDimensionMismatch,
  kDegenerateSpace,
  kObjectiveFailure,
  kTooFewModels,
  kLengthMismatch,
  kTooFewSamples,
  kInsufficientHistory,
  kIoFailure,
  kParseError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this one exception type; the
// code tells callers which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Calendar day stored as a count of days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days_since_epoch)
      : days_(days_since_epoch) {}

  // Parses YYYY-MM-DD. Throws Error(kParseError) on anything else.
  static Date parse(std::string_view iso);

  std::string to_string() const;
  constexpr std::int32_t days() const noexcept { return days_; }

  constexpr Date operator+(std::int32_t n) const { return Date(days_ + n); }
  constexpr Date operator-(std::int32_t n) const { return Date(days_ - n); }
  constexpr std::int32_t operator-(Date other) const {
    return days_ - other.days_;
  }

  constexpr auto operator<=>(const Date&) const = default;

 private:
  std::int32_t days_ = 0;
};

// 64-bit FNV-1a; used for config hashes that must be stable across builds.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace clickstack

#endif  // CLICKSTACK_COMMON_HPP
