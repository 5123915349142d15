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

#include "fybench/common.h"

#include <string>

namespace fybench {

void check_scores(const Vector& s, Index min_size) {
  if (s.size() < min_size) {
    throw DomainError("score vector needs at least " +
                      std::to_string(min_size) + " entries, got " +
                      std::to_string(s.size()));
  }
  if (!s.allFinite()) throw DomainError("score vector has non-finite entries");
}

void check_class_index(Index index, Index size) {
  if (index < 0 || index >= size) {
    throw DomainError("class index " + std::to_string(index) +
                      " out of range [0, " + std::to_string(size) + ")");
  }
}

double log_sum_exp(const Vector& s) {
  const double m = s.maxCoeff();
  return m + std::log((s.array() - m).exp().sum());
}

}  // namespace fybench
