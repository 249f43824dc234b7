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

#include "clickstack/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include "csv.hpp"

namespace clickstack {

namespace {

bool is_missing_token(std::string_view cell) {
  return cell.empty() || cell == "n/a" || cell == "N/A" || cell == "NA" ||
         cell == "nan" || cell == "NaN";
}

std::optional<double> parse_real(std::string_view cell) {
  if (is_missing_token(cell)) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() ||
      !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

}  // namespace

void RawTable::validate() const {
  const std::size_t n = rows();
  if (entity_ids.size() != n || target.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "ragged key/target columns");
  }
  for (const auto& c : numeric) {
    if (c.values.size() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "ragged column " + c.name);
    }
  }
  for (const auto& c : categorical) {
    if (c.values.size() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "ragged column " + c.name);
    }
  }
  std::set<std::pair<std::string_view, Date>> keys;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keys.emplace(entity_ids[i], dates[i]).second) {
      throw Error(ErrorCode::kDuplicateKey,
                  entity_ids[i] + " @ " + dates[i].to_string());
    }
    if (target[i] && (!std::isfinite(*target[i]) || *target[i] < 0.0)) {
      throw Error(ErrorCode::kNonFiniteInput,
                  "target must be finite and >= 0 at row " +
                      std::to_string(i));
    }
  }
}

const NumericColumn* RawTable::find_numeric(std::string_view name) const {
  for (const auto& c : numeric) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const CategoricalColumn* RawTable::find_categorical(
    std::string_view name) const {
  for (const auto& c : categorical) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::size_t RawTable::missing_cells() const {
  std::size_t count = 0;
  for (const auto& c : numeric) {
    count += static_cast<std::size_t>(std::ranges::count_if(
        c.values, [](const auto& v) { return !v.has_value(); }));
  }
  for (const auto& c : categorical) {
    count += static_cast<std::size_t>(std::ranges::count_if(
        c.values, [](const auto& v) { return !v.has_value(); }));
  }
  return count;
}

std::vector<Date> RawTable::distinct_dates() const {
  std::vector<Date> out(dates);
  std::ranges::sort(out);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RawTable RawTable::select_rows(std::span<const std::size_t> rows) const {
  RawTable out;
  out.target_name = target_name;
  out.entity_ids.reserve(rows.size());
  out.dates.reserve(rows.size());
  out.target.reserve(rows.size());
  for (std::size_t r : rows) {
    out.entity_ids.push_back(entity_ids[r]);
    out.dates.push_back(dates[r]);
    out.target.push_back(target[r]);
  }
  for (const auto& c : numeric) {
    NumericColumn nc{c.name, {}};
    nc.values.reserve(rows.size());
    for (std::size_t r : rows) nc.values.push_back(c.values[r]);
    out.numeric.push_back(std::move(nc));
  }
  for (const auto& c : categorical) {
    CategoricalColumn cc{c.name, {}};
    cc.values.reserve(rows.size());
    for (std::size_t r : rows) cc.values.push_back(c.values[r]);
    out.categorical.push_back(std::move(cc));
  }
  return out;
}

RawTable RawTable::sorted_by_entity_date() const {
  std::vector<std::size_t> order(rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) {
    if (entity_ids[a] != entity_ids[b]) return entity_ids[a] < entity_ids[b];
    return dates[a] < dates[b];
  });
  return select_rows(order);
}

RawTable load_table(const std::filesystem::path& path,
                    const TableSchema& schema, LoadDiagnostics* diagnostics) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto records = detail::parse_csv(buffer.str());
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyTable, path.string() + " has no header");
  }
  const auto& header = records.front();

  auto column_index = [&](const std::string& name) -> std::size_t {
    auto it = std::ranges::find(header, name);
    if (it == header.end()) {
      throw Error(ErrorCode::kMissingColumn,
                  "'" + name + "' not found in " + path.string());
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t entity_col = column_index(schema.entity_column);
  const std::size_t date_col = column_index(schema.date_column);
  const std::size_t target_col = column_index(schema.target_column);
  std::set<std::size_t> categorical_cols;
  for (const auto& name : schema.categorical_columns) {
    categorical_cols.insert(column_index(name));
  }

  RawTable table;
  table.target_name = schema.target_column;
  std::vector<std::size_t> numeric_cols;
  std::vector<std::size_t> categorical_order;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == entity_col || c == date_col || c == target_col) continue;
    if (categorical_cols.contains(c)) {
      categorical_order.push_back(c);
      table.categorical.push_back({header[c], {}});
    } else {
      numeric_cols.push_back(c);
      table.numeric.push_back({header[c], {}});
    }
  }

  LoadDiagnostics diag;
  for (std::size_t line = 1; line < records.size(); ++line) {
    const auto& rec = records[line];
    if (rec.size() == 1 && rec[0].empty()) continue;  // blank line
    if (rec.size() != header.size()) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ": line " + std::to_string(line + 1) +
                      " has " + std::to_string(rec.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    const auto target = parse_real(rec[target_col]);
    if (!target || *target < 0.0) {
      ++diag.dropped_unlabeled_rows;
      continue;
    }
    table.entity_ids.push_back(rec[entity_col]);
    table.dates.push_back(Date::parse(rec[date_col]));
    table.target.push_back(target);
    for (std::size_t k = 0; k < numeric_cols.size(); ++k) {
      table.numeric[k].values.push_back(parse_real(rec[numeric_cols[k]]));
    }
    for (std::size_t k = 0; k < categorical_order.size(); ++k) {
      const auto& cell = rec[categorical_order[k]];
      table.categorical[k].values.push_back(
          is_missing_token(cell) ? std::nullopt
                                 : std::optional<std::string>(cell));
    }
  }
  if (table.rows() == 0) {
    throw Error(ErrorCode::kEmptyTable, path.string() + " has no data rows");
  }
  table.validate();
  diag.missing_cells = table.missing_cells();
  if (diagnostics) *diagnostics = diag;
  return table;
}

void write_table(const RawTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  }
  std::vector<std::string> header{"entity_id", "date"};
  for (const auto& c : table.numeric) header.push_back(c.name);
  for (const auto& c : table.categorical) header.push_back(c.name);
  header.push_back(table.target_name);
  out << detail::format_csv_row(header);

  std::vector<std::string> row;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    row.clear();
    row.push_back(table.entity_ids[i]);
    row.push_back(table.dates[i].to_string());
    for (const auto& c : table.numeric) {
      row.push_back(c.values[i] ? detail::format_real(*c.values[i]) : "");
    }
    for (const auto& c : table.categorical) {
      row.push_back(c.values[i].value_or(""));
    }
    row.push_back(table.target[i] ? detail::format_real(*table.target[i])
                                  : "");
    out << detail::format_csv_row(row);
  }
  if (!out) {
    throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
  }
}

// ---------------------------------------------------------------------------
// Synthetic generator

void SyntheticConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidConfig, msg);
  };
  if (n_entities <= 0) fail("n_entities must be positive");
  if (n_days <= 0) fail("n_days must be positive");
  if (seasonal_period <= 0) fail("seasonal_period must be positive");
  if (seasonal_period > n_days) fail("seasonal_period must be <= n_days");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    fail("noise_std must be >= 0");
  }
  if (!(missing_rate >= 0.0 && missing_rate <= 1.0)) {
    fail("missing_rate must lie in [0, 1]");
  }
  if (n_noise_features < 0) fail("n_noise_features must be >= 0");
  if (!std::isfinite(trend_slope) || !std::isfinite(seasonal_amplitude) ||
      !std::isfinite(feature_effect_scale)) {
    fail("trend_slope, seasonal_amplitude, feature_effect_scale must be finite");
  }
  try {
    (void)Date::parse(start_date);
  } catch (const Error& e) {
    fail(std::string("start_date: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const SyntheticConfig& cfg) {
  j = nlohmann::json{{"n_entities", cfg.n_entities},
                     {"n_days", cfg.n_days},
                     {"seasonal_period", cfg.seasonal_period},
                     {"seasonal_amplitude", cfg.seasonal_amplitude},
                     {"trend_slope", cfg.trend_slope},
                     {"noise_std", cfg.noise_std},
                     {"feature_effect_scale", cfg.feature_effect_scale},
                     {"missing_rate", cfg.missing_rate},
                     {"n_noise_features", cfg.n_noise_features},
                     {"seed", cfg.seed},
                     {"start_date", cfg.start_date},
                     {"integer_counts", cfg.integer_counts}};
}

void from_json(const nlohmann::json& j, SyntheticConfig& cfg) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidConfig, "synthetic config must be an object");
  }
  static const std::set<std::string> known{
      "n_entities",       "n_days",      "seasonal_period",
      "seasonal_amplitude", "trend_slope", "noise_std",
      "missing_rate",     "n_noise_features", "seed", "feature_effect_scale",
      "start_date",       "integer_counts"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) {
      throw Error(ErrorCode::kInvalidConfig, "unknown synthetic key '" + key + "'");
    }
  }
  SyntheticConfig out;
  try {
    out.n_entities = j.value("n_entities", out.n_entities);
    out.n_days = j.value("n_days", out.n_days);
    out.seasonal_period = j.value("seasonal_period", out.seasonal_period);
    out.seasonal_amplitude =
        j.value("seasonal_amplitude", out.seasonal_amplitude);
    out.trend_slope = j.value("trend_slope", out.trend_slope);
    out.noise_std = j.value("noise_std", out.noise_std);
    out.missing_rate = j.value("missing_rate", out.missing_rate);
    out.feature_effect_scale =
        j.value("feature_effect_scale", out.feature_effect_scale);
    out.n_noise_features = j.value("n_noise_features", out.n_noise_features);
    out.seed = j.value("seed", out.seed);
    out.start_date = j.value("start_date", out.start_date);
    out.integer_counts = j.value("integer_counts", out.integer_counts);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  out.validate();
  cfg = std::move(out);
}

std::vector<std::string> synthetic_informative_columns() {
  return {"bid", "competitor_price", "temperature", "exchange_rate",
          "holiday_distance"};
}

std::vector<std::string> synthetic_categorical_columns() {
  return {"region", "hotel_type"};
}

TableSchema synthetic_schema() {
  TableSchema schema;
  schema.categorical_columns = synthetic_categorical_columns();
  return schema;
}

namespace {

// Linear effects of the informative columns on daily clicks.
constexpr double kBidCoef = 20.0;
constexpr double kCompetitorCoef = -0.2;
constexpr double kTemperatureCoef = 0.5;
constexpr double kExchangeCoef = -30.0;
constexpr double kHolidayCoef = -0.4;

struct Level {
  const char* name;
  double shift;
};
constexpr Level kRegions[] = {
    {"north", 0.0}, {"south", 12.0}, {"east", -8.0}, {"west", 5.0}};
constexpr Level kHotelTypes[] = {
    {"city", 0.0}, {"resort", 6.0}, {"boutique", -4.0}};

}  // namespace

RawTable generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  const int n_days = cfg.n_days;
  const int n_entities = cfg.n_entities;

  // Day-level exogenous series shared by all entities.
  std::vector<double> exchange(n_days), temperature(n_days),
      holiday_distance(n_days);
  double fx = 1.0;
  for (int d = 0; d < n_days; ++d) {
    fx += 0.01 * gauss(rng);
    exchange[d] = fx;
    temperature[d] =
        15.0 + 10.0 * std::sin(2.0 * std::numbers::pi * d / 365.0) +
        2.0 * gauss(rng);
  }
  {
    std::vector<int> holidays;
    int next = std::uniform_int_distribution<int>(0, 20)(rng);
    while (next < n_days + 40) {
      holidays.push_back(next);
      next += std::uniform_int_distribution<int>(10, 40)(rng);
    }
    std::size_t h = 0;
    for (int d = 0; d < n_days; ++d) {
      while (holidays[h] < d) ++h;
      holiday_distance[d] = std::min(30, holidays[h] - d);
    }
  }

  std::vector<double> seasonal(cfg.seasonal_period);
  for (int p = 0; p < cfg.seasonal_period; ++p) {
    seasonal[p] = cfg.seasonal_amplitude *
                  std::sin(2.0 * std::numbers::pi * p / cfg.seasonal_period);
  }

  struct Entity {
    std::string id;
    double base;
    const Level* region;
    const Level* hotel_type;
    double bid_level;
    double competitor_level;
  };
  std::vector<Entity> entities;
  for (int e = 0; e < n_entities; ++e) {
    char id[32];
    std::snprintf(id, sizeof id, "hotel_%03d", e);
    Entity ent;
    ent.id = id;
    ent.base = uniform(60.0, 120.0);
    ent.region = &kRegions[std::uniform_int_distribution<int>(0, 3)(rng)];
    ent.hotel_type =
        &kHotelTypes[std::uniform_int_distribution<int>(0, 2)(rng)];
    ent.bid_level = uniform(0.5, 2.0);
    ent.competitor_level = uniform(80.0, 150.0);
    entities.push_back(ent);
  }

  RawTable table;
  table.target_name = "clicks";
  for (const auto& name : synthetic_informative_columns()) {
    table.numeric.push_back({name, {}});
  }
  for (int k = 0; k < cfg.n_noise_features; ++k) {
    table.numeric.push_back({"noise_" + std::to_string(k), {}});
  }
  for (const auto& name : synthetic_categorical_columns()) {
    table.categorical.push_back({name, {}});
  }

  const Date start = Date::parse(cfg.start_date);
  const std::size_t total = std::size_t(n_days) * std::size_t(n_entities);
  table.entity_ids.reserve(total);
  table.dates.reserve(total);
  table.target.reserve(total);

  std::vector<double> numeric_row(table.numeric.size());
  for (int d = 0; d < n_days; ++d) {
    for (const auto& ent : entities) {
      const double bid =
          std::max(0.05, ent.bid_level * (1.0 + 0.2 * gauss(rng)));
      const double competitor = ent.competitor_level + 5.0 * gauss(rng);
      numeric_row[0] = bid;
      numeric_row[1] = competitor;
      numeric_row[2] = temperature[d];
      numeric_row[3] = exchange[d];
      numeric_row[4] = holiday_distance[d];
      for (int k = 0; k < cfg.n_noise_features; ++k) {
        numeric_row[5 + k] = gauss(rng);
      }

      const double exogenous =
          kBidCoef * bid + kCompetitorCoef * competitor +
          kTemperatureCoef * temperature[d] + kExchangeCoef * exchange[d] +
          kHolidayCoef * holiday_distance[d];
      double clicks = ent.base + ent.region->shift + ent.hotel_type->shift +
                      cfg.trend_slope * d +
                      seasonal[d % cfg.seasonal_period] +
                      cfg.feature_effect_scale * exogenous;
      const double noise = gauss(rng);
      clicks += cfg.noise_std * noise;
      if (cfg.integer_counts) clicks = std::max(0.0, std::round(clicks));

      table.entity_ids.push_back(ent.id);
      table.dates.push_back(start + d);
      table.target.push_back(clicks);
      for (std::size_t k = 0; k < numeric_row.size(); ++k) {
        table.numeric[k].values.push_back(numeric_row[k]);
      }
      table.categorical[0].values.push_back(ent.region->name);
      table.categorical[1].values.push_back(ent.hotel_type->name);
    }
  }

  // Missingness drawn from its own stream so toggling it leaves the signal
  // untouched.
  if (cfg.missing_rate > 0.0) {
    std::mt19937_64 mask_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::bernoulli_distribution drop(cfg.missing_rate);
    for (std::size_t i = 0; i < total; ++i) {
      for (auto& c : table.numeric) {
        if (drop(mask_rng)) c.values[i].reset();
      }
      for (auto& c : table.categorical) {
        if (drop(mask_rng)) c.values[i].reset();
      }
    }
  }
  return table;
}

ChronoSplit chronological_split(const RawTable& table, Date test_day) {
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    if (table.dates[i] < test_day) {
      train_rows.push_back(i);
    } else if (table.dates[i] == test_day) {
      test_rows.push_back(i);
    }
  }
  if (test_rows.empty()) {
    throw Error(ErrorCode::kDayAbsent, test_day.to_string());
  }
  if (train_rows.empty()) {
    throw Error(ErrorCode::kNoTrainData,
                "no rows before " + test_day.to_string());
  }
  return {table.select_rows(train_rows), table.select_rows(test_rows),
          test_day};
}

}  // namespace clickstack
