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

#ifndef FYBENCH_PROPOSAL_H_
#define FYBENCH_PROPOSAL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "fybench/common.h"
#include "fybench/random.h"

namespace fybench {

// O(1) sampling from a fixed discrete distribution (Walker/Vose alias method).
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(const Vector& probabilities);

  Index sample(Stream& rng) const;
  Index size() const { return static_cast<Index>(prob_.size()); }

 private:
  std::vector<double> prob_;
  std::vector<Index> alias_;
  bool flat_ = false;  // every column keeps itself; skips the table lookup
};

enum class ProposalKind { kUniform, kLogUniform, kEmpirical, kDns };

// Negative-sampling proposal Q over C classes.
//  - Uniform:    q_j = 1/C
//  - LogUniform: q_j proportional to 1/(j + 2)
//  - Empirical:  q_j proportional to supplied nonnegative weights (all > 0
//                after normalization is required)
//  - DNS:        draw `pool` uniform candidates, keep the `top` highest-scoring
//                under the current model. q() reports the uniform pool
//                probability, so the log-q correction is a constant shift.
class ProposalDist {
 public:
  static ProposalDist Uniform(Index num_classes);
  static ProposalDist LogUniform(Index num_classes);
  static ProposalDist Empirical(const Vector& weights);
  static ProposalDist Dns(Index num_classes, Index pool = 500, Index top = 100);

  ProposalKind kind() const { return kind_; }
  Index num_classes() const { return probabilities_.size(); }
  const Vector& probabilities() const { return probabilities_; }
  double q(Index j) const { return probabilities_[j]; }
  Index pool() const { return pool_; }
  Index top() const { return top_; }
  std::string name() const;

  // i.i.d. draw (with replacement). Not valid for DNS, which needs scores.
  Index sample(Stream& rng) const;

 private:
  ProposalKind kind_ = ProposalKind::kUniform;
  Vector probabilities_;
  AliasTable table_;
  Index pool_ = 0;
  Index top_ = 0;
};

// Negatives y'_1..y'_k, drawn i.i.d. (duplicates allowed).
struct SampleDraw {
  std::vector<Index> negatives;
  Index k() const { return static_cast<Index>(negatives.size()); }
};

// k i.i.d. draws from q using the stream derived from (seed, example_index).
SampleDraw draw_negatives(const ProposalDist& q, Index k, std::uint64_t seed,
                          std::uint64_t example_index);
SampleDraw draw_negatives(const ProposalDist& q, Index k, Stream& rng);

// DNS: `pool` uniform candidates (with replacement), the `top` best by score.
// Ties keep the earlier candidate. `score_of` is evaluated once per candidate.
template <typename ScoreFn>
SampleDraw draw_dns(Index num_classes, Index pool, Index top, Stream& rng,
                    ScoreFn&& score_of);

}  // namespace fybench

#include "fybench/proposal_inl.h"

#endif  // FYBENCH_PROPOSAL_H_
