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

#include "fybench/fy_losses.h"

#include <cmath>
#include <sstream>

namespace fybench {

LabelVector::LabelVector(Vector values) : values_(std::move(values)) {
  for (Index i = 0; i < values_.size(); ++i) {
    if (values_[i] != 0.0 && values_[i] != 1.0) {
      throw DomainError("label entries must be 0 or 1");
    }
    relevant_count_ += values_[i] == 1.0 ? 1 : 0;
  }
  if (relevant_count_ == 0) throw DomainError("label vector has no positives");
}

LabelVector LabelVector::one_hot(Index num_classes, Index cls) {
  check_class_index(cls, num_classes);
  Vector v = Vector::Zero(num_classes);
  v[cls] = 1.0;
  return LabelVector(std::move(v));
}

LabelVector LabelVector::from_indices(Index num_classes,
                                      const std::vector<Index>& positives) {
  Vector v = Vector::Zero(num_classes);
  for (Index i : positives) {
    check_class_index(i, num_classes);
    v[i] = 1.0;
  }
  return LabelVector(std::move(v));
}

std::vector<Index> LabelVector::positives() const {
  std::vector<Index> out;
  for (Index i = 0; i < values_.size(); ++i) {
    if (values_[i] != 0.0) out.push_back(i);
  }
  return out;
}

RegularizerKind RegularizerKind::TsallisNeg(double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) {
    throw DomainError("Tsallis alpha must lie in (1, 2]");
  }
  return {RegularizerFamily::kTsallisNeg, alpha};
}

MappingKind RegularizerKind::mapping() const {
  switch (family) {
    case RegularizerFamily::kShannonNeg:
      return MappingKind::Softmax();
    case RegularizerFamily::kHalfSquaredL2:
      return MappingKind::Sparsemax();
    case RegularizerFamily::kTsallisNeg:
      return MappingKind::Entmax(alpha);
  }
  throw UsageError("unknown regularizer");
}

std::string RegularizerKind::name() const {
  switch (family) {
    case RegularizerFamily::kShannonNeg:
      return "shannon";
    case RegularizerFamily::kHalfSquaredL2:
      return "half_squared_l2";
    case RegularizerFamily::kTsallisNeg: {
      std::ostringstream os;
      os << "tsallis" << alpha;
      return os.str();
    }
  }
  return "unknown";
}

double regularizer_value(const Vector& p, const RegularizerKind& reg) {
  switch (reg.family) {
    case RegularizerFamily::kShannonNeg: {
      double total = 0.0;
      for (Index i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) total += p[i] * std::log(p[i]);
      }
      return total;
    }
    case RegularizerFamily::kHalfSquaredL2:
      return 0.5 * p.squaredNorm();
    case RegularizerFamily::kTsallisNeg: {
      double total = 0.0;
      for (Index i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) total += std::pow(p[i], reg.alpha);
      }
      return (total - 1.0) / (reg.alpha * (reg.alpha - 1.0));
    }
  }
  throw UsageError("unknown regularizer");
}

LossEval fy_loss(const Vector& s, const LabelVector& y,
                 const RegularizerKind& reg) {
  check_scores(s);
  if (y.size() != s.size()) {
    throw UsageError("label and score vectors differ in length");
  }
  const Vector p = apply_mapping(s, reg.mapping()).probabilities;
  const Vector target = y.normalized();
  const double conjugate = s.dot(p) - regularizer_value(p, reg);
  LossEval out;
  out.value = conjugate + regularizer_value(target, reg) - s.dot(target);
  out.gradient = p - target;
  return out;
}

LossEval fy_loss(const Vector& s, const LabelVector& y,
                 const RegularizerKind& reg, const MappingKind& mapping) {
  const MappingKind expected = reg.mapping();
  if (expected.family != mapping.family ||
      (expected.family == MappingFamily::kEntmax &&
       expected.alpha != mapping.alpha)) {
    throw UsageError("regularizer " + reg.name() +
                     " does not generate mapping " + mapping.name());
  }
  return fy_loss(s, y, reg);
}

LossEval softmax_loss(const Vector& s, const LabelVector& y) {
  check_scores(s);
  if (y.size() != s.size()) {
    throw UsageError("label and score vectors differ in length");
  }
  const double lse = log_sum_exp(s);
  const double count = static_cast<double>(y.relevant_count());
  LossEval out;
  out.value = count * lse - s.dot(y.values());
  out.gradient = count * (s.array() - lse).exp().matrix() - y.values();
  return out;
}

Vector rankmax_grad(const Vector& s, Index true_class) {
  Vector g = rankmax_map(s, true_class).probabilities;
  g[true_class] -= 1.0;
  return g;
}

LossEval rankmax_loss(const Vector& s, Index true_class) {
  LossEval out;
  out.gradient = rankmax_grad(s, true_class);
  out.value = 0.5 * out.gradient.squaredNorm();
  return out;
}

LossEval rankmax_potential(const Vector& s, Index true_class) {
  const MapResult rm = rankmax_map(s, true_class);
  LossEval out;
  for (Index j = 0; j < s.size(); ++j) {
    if (j == true_class) continue;
    const double u = s[j] - s[true_class] + 1.0;
    if (u > 0.0) out.value += 0.5 * u * u;
  }
  out.gradient = rm.probabilities;
  out.gradient[true_class] -= 1.0;
  out.gradient /= rm.probabilities[true_class];
  return out;
}

}  // namespace fybench
