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

#ifndef FYBENCH_ORACLES_H_
#define FYBENCH_ORACLES_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fybench/common.h"
#include "fybench/fy_losses.h"
#include "fybench/random.h"
#include "fybench/simplex_maps.h"

namespace fybench {

// Scores whose image under the mapping is p.
//   softmax:   log p - mean(log p)   (p must be strictly positive)
//   sparsemax: p
//   entmax:    p^(alpha - 1) / (alpha - 1)
//   rankmax:   with y = argmax p, s_y = 0, s_i = p_i / p_y - 1 on the
//              support and -2 elsewhere; use with MappingKind::Rankmax(y)
Vector bayes_optimal_scores(const Vector& p, const MappingKind& mapping);

// The rankmax true class used by bayes_optimal_scores (first argmax).
Index rankmax_anchor(const Vector& p);

// Dirichlet(1, ..., 1) draw.
Vector dirichlet_uniform(Index size, Stream& rng);

// A posterior with `zeros` exact-zero entries at random positions and a
// Dirichlet(1) block on the rest.
Vector sparse_posterior(Index size, Index zeros, Stream& rng);

struct CalibrationVerdict {
  MappingKind mapping;
  Index trials = 0;
  std::vector<Index> k_values;
  std::vector<Index> topk_matches;  // per k
  Index roundtrip_failures = 0;
  bool support_separation_ok = true;
  bool order_within_support_ok = true;
  std::vector<std::string> counterexamples;  // at most 10

  Index violations() const;
  std::string to_json() const;
};

// Dirichlet(1) posteriors plus, for sparse mappings, as many constructed
// sparse posteriors. For k <= |support| the top-k sets must agree; for
// larger k the scores' top-k must contain the whole support.
CalibrationVerdict check_topk_calibration(const MappingKind& mapping,
                                          Index num_classes,
                                          const std::vector<Index>& k_values,
                                          Index trials, std::uint64_t seed);

using LossEvaluator = std::function<LossEval(const Vector&)>;

// Central differences per coordinate:
//   max_i |fd_i - g_i| / max(||g||_inf, 1e-8).
double grad_check(const LossEvaluator& loss, const Vector& s, double h = 1e-5);

// True when a probe of half-width h could cross a support boundary
// (some |s_i - tau| < 10 h).
bool near_kink(const Vector& s, const MappingKind& mapping, double h);

// Gradient descent on E_{y~p}[softmax loss] = lse(s) - <p, s>. Returns the
// fitted softmax(s).
Vector posterior_matching_descent(const Vector& p, int max_iterations = 100000,
                                  double tolerance = 1e-13);

}  // namespace fybench

#endif  // FYBENCH_ORACLES_H_
