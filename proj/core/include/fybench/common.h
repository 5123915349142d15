// Copyright 2026 The fybench Authors. All Rights Reserved.
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

#ifndef FYBENCH_COMMON_H_
#define FYBENCH_COMMON_H_

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace fybench {

using Index = std::int64_t;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Embedding tables are read and updated a row at a time.
using FactorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Raised when an input lies outside the mathematical domain of an operation
// (non-finite logits, alpha outside (1, 2], zero labels, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised when arguments are well-formed numbers but the combination is not a
// valid use of the API (mismatched regularizer/mapping, missing inputs).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised for invalid experiment or training configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Probabilities below this are treated as exact zeros.
inline constexpr double kProbabilityFloor = 1e-300;

// Throws DomainError unless every entry is finite and there are >= min_size.
void check_scores(const Vector& s, Index min_size = 2);

// Throws DomainError unless 0 <= index < size.
void check_class_index(Index index, Index size);

// log(sum_j exp(s_j)) with max-shift stabilization.
double log_sum_exp(const Vector& s);

// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Position discount 1 / log2(i + 1) for a 1-based rank position i.
inline double dcg_weight(Index position) {
  return 1.0 / std::log2(static_cast<double>(position) + 1.0);
}

}  // namespace fybench

#endif  // FYBENCH_COMMON_H_
