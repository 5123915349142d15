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

#ifndef FYBENCH_FY_LOSSES_H_
#define FYBENCH_FY_LOSSES_H_

#include <string>
#include <vector>

#include "fybench/common.h"
#include "fybench/simplex_maps.h"

namespace fybench {

// Binary relevance vector with at least one positive.
class LabelVector {
 public:
  explicit LabelVector(Vector values);

  static LabelVector one_hot(Index num_classes, Index cls);
  static LabelVector from_indices(Index num_classes,
                                  const std::vector<Index>& positives);

  const Vector& values() const { return values_; }
  Index size() const { return values_.size(); }
  Index relevant_count() const { return relevant_count_; }
  bool is_relevant(Index i) const { return values_[i] != 0.0; }
  std::vector<Index> positives() const;

  // y / |y|, a point of the simplex.
  Vector normalized() const {
    return values_ / static_cast<double>(relevant_count_);
  }

 private:
  Vector values_;
  Index relevant_count_ = 0;
};

enum class RegularizerFamily { kShannonNeg, kHalfSquaredL2, kTsallisNeg };

struct RegularizerKind {
  RegularizerFamily family = RegularizerFamily::kShannonNeg;
  double alpha = 1.5;  // Tsallis only

  static RegularizerKind ShannonNeg() { return {RegularizerFamily::kShannonNeg}; }
  static RegularizerKind HalfSquaredL2() {
    return {RegularizerFamily::kHalfSquaredL2};
  }
  static RegularizerKind TsallisNeg(double alpha);

  // The mapping p = grad Omega^*(s) generated by this regularizer.
  MappingKind mapping() const;
  std::string name() const;
};

struct LossEval {
  double value = 0.0;
  Vector gradient;
};

// Omega(p) for p in the simplex:
//   Shannon:  sum_i p_i log p_i              (0 log 0 = 0)
//   L2:       0.5 ||p||^2
//   Tsallis:  (sum_i p_i^alpha - 1) / (alpha (alpha - 1))
double regularizer_value(const Vector& p, const RegularizerKind& reg);

// L(y, s) = Omega^*(s) + Omega(y/|y|) - <s, y/|y|>, with
// Omega^*(s) = <s, p> - Omega(p) and p from the matching forward map.
// The gradient is p - y/|y|. For Shannon and a label with |y| positives the
// value equals softmax_loss(s, y) / |y| - log |y|.
LossEval fy_loss(const Vector& s, const LabelVector& y,
                 const RegularizerKind& reg);

// Same, but rejects a mapping that does not correspond to reg.
LossEval fy_loss(const Vector& s, const LabelVector& y,
                 const RegularizerKind& reg, const MappingKind& mapping);

// Multi-positive cross entropy -sum_{i: y_i = 1} log softmax(s)_i.
// Its gradient |y| softmax(s) - y is |y| times the F-Y residual.
LossEval softmax_loss(const Vector& s, const LabelVector& y);

// p^rm(s; y) - e_y.
Vector rankmax_grad(const Vector& s, Index true_class);

// Value is the residual energy 0.5 ||p^rm - e_y||^2 (a progress proxy; the
// mapping has no closed-form potential here). Gradient is rankmax_grad.
LossEval rankmax_loss(const Vector& s, Index true_class);

// The rankmax residual is not a gradient field (its Jacobian is not
// symmetric), but it is a rescaled one:
//   Phi(s) = 0.5 sum_{j != y} (s_j - s_y + 1)_+^2,  grad Phi = S (p^rm - e_y)
// with S = sum_j (s_j - s_y + 1)_+ = 1 / p_y. The returned gradient is built
// from rankmax_grad, so a finite-difference check of this pair checks it.
LossEval rankmax_potential(const Vector& s, Index true_class);

}  // namespace fybench

#endif  // FYBENCH_FY_LOSSES_H_
