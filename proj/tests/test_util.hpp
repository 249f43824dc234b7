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


#ifndef CLICKSTACK_TESTS_TEST_UTIL_HPP
#define CLICKSTACK_TESTS_TEST_UTIL_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "clickstack/preprocess.hpp"

namespace clickstack::testing {

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows,
                                     Eigen::Index cols) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
  return random_matrix(rng, n, 1).col(0);
}

/// Wraps X/y in a FeatureMatrix with `rows_per_day` rows per consecutive
/// day, entities e0, e1, ... within a day.
inline FeatureMatrix make_matrix(const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& y,
                                 int rows_per_day = 1) {
  FeatureMatrix m;
  m.values = X;
  m.target = y;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    m.column_names.push_back("x" + std::to_string(j));
  }
  const Date start = Date::parse("2021-03-01");
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    m.row_keys.push_back({"e" + std::to_string(i % rows_per_day),
                          start + static_cast<std::int32_t>(i / rows_per_day)});
  }
  return m;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::filesystem::path& path,
                       const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("clickstack_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace clickstack::testing

#endif  // CLICKSTACK_TESTS_TEST_UTIL_HPP
