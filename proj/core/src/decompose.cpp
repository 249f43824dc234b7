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

#include <algorithm>
#include <map>
#include <numeric>

#include "clickstack/preprocess.hpp"
#include "entity_index.hpp"

namespace clickstack {

Decomposition seasonal_decompose(std::span<const double> series, int period) {
  if (period <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "period must be positive");
  }
  const std::size_t n = series.size();
  const std::size_t p = static_cast<std::size_t>(period);
  if (n < 2 * p) {
    throw Error(ErrorCode::kSeriesTooShort,
                "need " + std::to_string(2 * p) + " points, got " +
                    std::to_string(n));
  }

  Decomposition out;
  out.period = period;
  out.trend.assign(n, 0.0);
  out.seasonal.assign(n, 0.0);
  out.residual.assign(n, 0.0);

  // Centered moving average. Even periods use a (period + 1)-tap filter
  // with half weights at both ends, i.e. the mean of the two straddling
  // windows.
  const std::size_t half = p / 2;
  const std::size_t lo = half;
  const std::size_t hi = n - half;
  for (std::size_t i = lo; i < hi; ++i) {
    double acc = 0.0;
    if (p % 2 == 1) {
      for (std::size_t k = i - half; k <= i + half; ++k) acc += series[k];
    } else {
      acc = 0.5 * (series[i - half] + series[i + half]);
      for (std::size_t k = i - half + 1; k < i + half; ++k) acc += series[k];
    }
    out.trend[i] = acc / static_cast<double>(p);
  }
  out.first_interior = lo;
  out.last_interior = hi;

  std::vector<double> phase_sum(p, 0.0);
  std::vector<std::size_t> phase_count(p, 0);
  for (std::size_t i = lo; i < hi; ++i) {
    phase_sum[i % p] += series[i] - out.trend[i];
    ++phase_count[i % p];
  }
  std::vector<double> profile(p, 0.0);
  for (std::size_t k = 0; k < p; ++k) {
    profile[k] = phase_count[k] ? phase_sum[k] / double(phase_count[k]) : 0.0;
  }
  const double centre =
      std::accumulate(profile.begin(), profile.end(), 0.0) / double(p);
  for (auto& v : profile) v -= centre;

  for (std::size_t i = 0; i < lo; ++i) out.trend[i] = out.trend[lo];
  for (std::size_t i = hi; i < n; ++i) out.trend[i] = out.trend[hi - 1];
  for (std::size_t i = 0; i < n; ++i) {
    out.seasonal[i] = profile[i % p];
    out.residual[i] = series[i] - out.trend[i] - out.seasonal[i];
  }
  return out;
}

RawTable decomposition_features(const RawTable& table,
                                const DecomposeOptions& options) {
  if (options.period <= 0 || options.window < 2 * options.period) {
    throw Error(ErrorCode::kInvalidConfig,
                "decomposition window must be >= 2 * period");
  }
  std::vector<std::string> columns = options.columns;
  if (columns.empty()) columns.push_back(table.target_name);

  RawTable out = table;
  const std::size_t n = table.rows();
  const auto groups = detail::rows_by_entity(table);
  const std::size_t min_len = 2 * static_cast<std::size_t>(options.period);

  for (const auto& name : columns) {
    const std::vector<std::optional<double>>* source = nullptr;
    if (name == table.target_name) {
      source = &table.target;
    } else if (const auto* col = table.find_numeric(name)) {
      source = &col->values;
    } else {
      throw Error(ErrorCode::kMissingColumn,
                  "decomposition column '" + name + "'");
    }
    NumericColumn trend{name + "_trend", std::vector<std::optional<double>>(n)};
    NumericColumn seasonal{name + "_seasonal",
                           std::vector<std::optional<double>>(n)};
    NumericColumn resid{name + "_resid", std::vector<std::optional<double>>(n)};
    NumericColumn empty{name + "_decomp_empty",
                        std::vector<std::optional<double>>(n)};

    std::vector<double> history;
    for (const auto& rows : groups) {
      for (std::size_t pos = 0; pos < rows.size(); ++pos) {
        const std::size_t row = rows[pos];
        history.clear();
        for (std::size_t q = pos; q-- > 0 &&
                                  history.size() < std::size_t(options.window);) {
          if (const auto& v = (*source)[rows[q]]) history.push_back(*v);
        }
        std::reverse(history.begin(), history.end());
        if (history.size() < min_len) {
          trend.values[row] = 0.0;
          seasonal.values[row] = 0.0;
          resid.values[row] = 0.0;
          empty.values[row] = 1.0;
          continue;
        }
        const auto d = seasonal_decompose(history, options.period);
        const std::size_t len = history.size();
        trend.values[row] = d.trend[len - 1];
        seasonal.values[row] = d.seasonal[len - options.period];
        resid.values[row] = d.residual[len - 1];
        empty.values[row] = 0.0;
      }
    }
    out.numeric.push_back(std::move(trend));
    out.numeric.push_back(std::move(seasonal));
    out.numeric.push_back(std::move(resid));
    out.numeric.push_back(std::move(empty));
  }
  return out;
}

}  // namespace clickstack
