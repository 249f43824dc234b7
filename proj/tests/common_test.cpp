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


#include <gtest/gtest.h>

#include "clickstack/common.hpp"

namespace clickstack {
namespace {

TEST(DateTest, ParsesAndFormatsIsoDates) {
  const Date d = Date::parse("2020-03-01");
  EXPECT_EQ(d.to_string(), "2020-03-01");
  EXPECT_EQ((d - 1).to_string(), "2020-02-29");
  EXPECT_EQ(Date::parse("1970-01-01").days(), 0);
  EXPECT_EQ(Date::parse("2021-01-01") - Date::parse("2020-01-01"), 366);
}

TEST(DateTest, RejectsMalformedInput) {
  for (const char* bad : {"2020-13-01", "2020-02-30", "20200101", "", "x"}) {
    try {
      Date::parse(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParseError) << bad;
    }
  }
}

TEST(HashTest, MatchesReferenceFnvValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(ErrorTest, MessageCarriesCodeName) {
  const Error e(ErrorCode::kDuplicateKey, "row 3");
  EXPECT_EQ(e.code(), ErrorCode::kDuplicateKey);
  EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
}

}  // namespace
}  // namespace clickstack
