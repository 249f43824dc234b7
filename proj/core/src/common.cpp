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

#include "clickstack/common.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace clickstack {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kDuplicateKey: return "DuplicateKey";
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kNoTrainData: return "NoTrainData";
    case ErrorCode::kDayAbsent: return "DayAbsent";
    case ErrorCode::kAllMissingColumn: return "AllMissingColumn";
    case ErrorCode::kSeriesTooShort: return "SeriesTooShort";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDegenerateSpace: return "DegenerateSpace";
    case ErrorCode::kObjectiveFailure: return "ObjectiveFailure";
    case ErrorCode::kTooFewModels: return "TooFewModels";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kInsufficientHistory: return "InsufficientHistory";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Date Date::parse(std::string_view iso) {
  int y = 0, m = 0, d = 0;
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' ||
      !parse_int(iso.substr(0, 4), y) || !parse_int(iso.substr(5, 2), m) ||
      !parse_int(iso.substr(8, 2), d)) {
    throw Error(ErrorCode::kParseError,
                "not an ISO-8601 date: '" + std::string(iso) + "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{unsigned(m)},
                                        std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) {
    throw Error(ErrorCode::kParseError,
                "invalid calendar date: '" + std::string(iso) + "'");
  }
  return Date(std::chrono::sys_days{ymd}.time_since_epoch().count());
}

std::string Date::to_string() const {
  const std::chrono::year_month_day ymd{
      std::chrono::sys_days{std::chrono::days{days_}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace clickstack
