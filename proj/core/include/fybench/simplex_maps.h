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

#ifndef FYBENCH_SIMPLEX_MAPS_H_
#define FYBENCH_SIMPLEX_MAPS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fybench/common.h"

namespace fybench {

// Prediction mappings from logits onto the probability simplex.
enum class MappingFamily { kSoftmax, kSparsemax, kEntmax, kRankmax };

struct MappingKind {
  MappingFamily family = MappingFamily::kSoftmax;
  double alpha = 2.0;      // entmax only, 1 < alpha <= 2
  Index true_class = 0;    // rankmax only

  static MappingKind Softmax() { return {MappingFamily::kSoftmax, 1.0, 0}; }
  static MappingKind Sparsemax() { return {MappingFamily::kSparsemax, 2.0, 0}; }
  static MappingKind Entmax(double alpha);
  static MappingKind Rankmax(Index true_class);

  bool is_sparse() const { return family != MappingFamily::kSoftmax; }
  std::string name() const;
};

// Parses "softmax", "sparsemax", "entmax" (with alpha) or "rankmax" (with y).
MappingKind parse_mapping(const std::string& name, double alpha = 1.5,
                          Index true_class = 0);

// Active support P(s) (ascending class indices) and the threshold tau.
// For rankmax tau is s_y - 1.
struct SupportInfo {
  std::vector<Index> support;
  double threshold = 0.0;

  Index size() const { return static_cast<Index>(support.size()); }
};

struct MapResult {
  Vector probabilities;
  SupportInfo support;
};

Vector softmax_map(const Vector& s);
MapResult sparsemax_map(const Vector& s);

struct EntmaxOptions {
  double tolerance = 1e-12;
  int max_iterations = 200;
};
MapResult entmax_map(const Vector& s, double alpha, EntmaxOptions opts = {});

MapResult rankmax_map(const Vector& s, Index true_class);

// Dispatches on kind. Softmax support is every class with p > floor.
MapResult apply_mapping(const Vector& s, const MappingKind& kind);

// Dense C x C Jacobian d p / d s for the active region of the mapping.
struct JacobianMatrix {
  Matrix entries;
  MappingKind mapping;
  SupportInfo support;
  // Set when some logit is within 1e-8 of the support threshold; the
  // Jacobian is then one-sided (taken from the forward map's support).
  bool near_boundary = false;
};

inline constexpr double kBoundaryProximity = 1e-8;

JacobianMatrix jacobian(const Vector& s, const MappingKind& kind);

// Smallest |s_i - tau| over all classes (rankmax: over i != y), or +inf for
// softmax. Used to keep finite-difference probes away from kinks.
double boundary_distance(const Vector& s, const MappingKind& kind);

struct SpectralNorm {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest singular value by power iteration on J^T J.
SpectralNorm spectral_norm(const Matrix& j, double tolerance = 1e-10,
                           int max_iterations = 1000);

enum class OrderVerdict { kSopConsistent, kWopWitnessed, kInversionFound };
std::string to_string(OrderVerdict v);

struct OrderWitness {
  Vector scores;
  Vector probabilities;
  Index i = 0;  // s_i > s_j
  Index j = 0;
};

struct OrderReport {
  MappingKind mapping;
  OrderVerdict verdict = OrderVerdict::kSopConsistent;
  Index trials = 0;
  Index tie_witness_count = 0;
  Index inversion_count = 0;
  std::optional<OrderWitness> tie_witness;
  std::optional<OrderWitness> inversion_witness;
};

// Samples standard-normal logits at scales {0.1, 1, 10} (round robin) and
// searches for inversions (s_i > s_j, p_i < p_j) and strict-order collapses
// (s_i > s_j + 1e-6 with p_i and p_j tied).
OrderReport classify_order_preservation(const MappingKind& kind, Index trials,
                                        std::uint64_t seed,
                                        Index num_classes = 5);

}  // namespace fybench

#endif  // FYBENCH_SIMPLEX_MAPS_H_
