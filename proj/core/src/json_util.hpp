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

#ifndef CLICKSTACK_SRC_JSON_UTIL_HPP
#define CLICKSTACK_SRC_JSON_UTIL_HPP

#include <algorithm>
#include <initializer_list>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "clickstack/common.hpp"

namespace clickstack::detail {

inline nlohmann::json to_json_array(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kParseError, "expected a JSON array of numbers");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

// Rejects non-objects and keys outside `allowed` so typos surface early.
inline void require_object(const nlohmann::json& j, std::string_view section,
                           std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string(section) + " must be a JSON object");
  }
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) ==
        allowed.end()) {
      throw Error(ErrorCode::kInvalidConfig, std::string(section) +
                                                 ": unknown key '" +
                                                 item.key() + "'");
    }
  }
}

}  // namespace clickstack::detail

#endif  // CLICKSTACK_SRC_JSON_UTIL_HPP
