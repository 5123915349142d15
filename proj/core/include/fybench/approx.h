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

#ifndef FYBENCH_APPROX_H_
#define FYBENCH_APPROX_H_

#include <span>
#include <vector>

#include "fybench/common.h"
#include "fybench/fy_losses.h"
#include "fybench/proposal.h"

namespace fybench {

// Losses over a compact logit list: entry 0 is the positive, entries 1..k the
// sampled negatives (duplicates stay separate). Gradients are with respect to
// the listed logits; callers scatter them back to classes.
struct CompactEval {
  double value = 0.0;
  std::vector<double> gradient;
};

// log(sum_i e^{l_i}) - l_0 and its gradient softmax(l) - e_0.
CompactEval sampled_softmax_compact(std::span<const double> logits);

// softplus(-(l_0 - c_0)) + sum_{i >= 1} softplus(l_i - c_i), c_i = log(k q_i).
CompactEval nce_compact(std::span<const double> logits,
                        std::span<const double> log_kq);

// -log(e^{s_y} / (e^{s_y} + sum_j e^{s_{y'_j}})).
LossEval ssm_simple_loss(const Vector& s, Index y, const SampleDraw& draw);

// SSM-Simple on s~ = s - log q, applied to the positive and the negatives.
LossEval ssm_corrected_loss(const Vector& s, Index y, const SampleDraw& draw,
                            const ProposalDist& q);

// -[log sig(s_y - log(k q_y)) + sum_j log sig(-s_{y'_j} + log(k q_{y'_j}))].
LossEval nce_loss(const Vector& s, Index y, const SampleDraw& draw,
                  const ProposalDist& q);

// Quadratic surrogate of the log-partition around s = 0:
//   log C + mean(s) + 0.5 s^T ((1/C) I - (1/C^2) 1 1^T) s.
double rg_partition(const Vector& s);

// sum_{i: y_i = 1} (Z_RG(s) - s_i); gradient |y| ((1/C) 1 + M s) - y.
LossEval rg_loss(const Vector& s, const LabelVector& y);

}  // namespace fybench

#endif  // FYBENCH_APPROX_H_
