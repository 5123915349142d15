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

#ifndef FYBENCH_METRICS_H_
#define FYBENCH_METRICS_H_

#include <string>
#include <vector>

#include "fybench/common.h"
#include "fybench/fy_losses.h"
#include "fybench/simplex_maps.h"

namespace fybench {

// Classes sorted by descending score, ties by ascending class index.
struct RankedList {
  std::vector<Index> permutation;

  static RankedList rank(const Vector& s);
  // Only the first `depth` positions, skipping classes with excluded[j].
  static RankedList top(const Vector& s, Index depth,
                        const std::vector<bool>* excluded = nullptr);
};

struct MetricsReport {
  std::vector<Index> cutoffs;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> ndcg;
  std::vector<double> topk_error;  // 1 when no relevant item is in the top k

  double value(const std::string& metric, Index cutoff) const;
};

// P@k, R@k, N@k and top-k error for each cutoff.
MetricsReport evaluate(const Vector& s, const LabelVector& y,
                       const std::vector<Index>& cutoffs);

// Same metrics from a relevance predicate over an explicit ranking.
// `relevant` lists the relevant classes; the ranking need not contain all.
MetricsReport evaluate_ranking(const std::vector<Index>& ranking,
                               const std::vector<Index>& relevant,
                               const std::vector<Index>& cutoffs);

// Element-wise mean of reports with identical cutoffs.
MetricsReport average(const std::vector<MetricsReport>& reports);

// CSV lines "user_count,cutoff,metric,value" (no header).
std::vector<std::string> to_csv_rows(const MetricsReport& report,
                                     Index user_count);
inline constexpr const char* kMetricsCsvHeader = "user_count,cutoff,metric,value";

struct TieBlock {
  Index z = 0;  // positions before the block
  Index m = 1;  // block size
  Index r = 0;  // relevant items in the block
};

struct TieDcg {
  double expected = 0.0;
  double optimal = 0.0;
  double gap = 0.0;
};

// Expected DCG of the block under uniformly random tie-breaking, the
// block-optimal DCG, and their difference.
TieDcg expected_tie_dcg(const TieBlock& block);

struct AlignmentGap {
  double inner = 0.0;             // <p - y, d>
  double comparator_inner = 0.0;  // same with zeroed negatives set to p~_j
  double gap = 0.0;               // comparator_inner - inner
  double double_sum = 0.0;        // sum_{j in Z} sum_{i positive} a_ij p~_j
};

// Pairwise DCG direction d = sum_{i pos, j neg} a_ij (e_j - e_i), with
// a_ij the position weight w of the positive's rank. p~ is softmax(s).
AlignmentGap wop_alignment_gap(const Vector& s, const LabelVector& y,
                               const MappingKind& mapping);

}  // namespace fybench

#endif  // FYBENCH_METRICS_H_
