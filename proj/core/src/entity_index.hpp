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

#ifndef CLICKSTACK_SRC_ENTITY_INDEX_HPP
#define CLICKSTACK_SRC_ENTITY_INDEX_HPP

#include <algorithm>
#include <map>
#include <string_view>
#include <vector>

#include "clickstack/dataset.hpp"

namespace clickstack::detail {

// Row indices grouped per entity (entities in lexicographic order), each
// group sorted by date.
inline std::vector<std::vector<std::size_t>> rows_by_entity(
    const RawTable& table) {
  std::map<std::string_view, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    groups[table.entity_ids[i]].push_back(i);
  }
  std::vector<std::vector<std::size_t>> out;
  out.reserve(groups.size());
  for (auto& [_, rows] : groups) {
    std::ranges::stable_sort(rows, [&](std::size_t a, std::size_t b) {
      return table.dates[a] < table.dates[b];
    });
    out.push_back(std::move(rows));
  }
  return out;
}

}  // namespace clickstack::detail

#endif  // CLICKSTACK_SRC_ENTITY_INDEX_HPP
