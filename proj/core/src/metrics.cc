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

#include "fybench/metrics.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <unordered_set>

namespace fybench {

namespace {

bool ranks_before(const Vector& s, Index a, Index b) {
  if (s[a] != s[b]) return s[a] > s[b];
  return a < b;
}

}  // namespace

RankedList RankedList::rank(const Vector& s) {
  RankedList out;
  out.permutation.resize(static_cast<std::size_t>(s.size()));
  std::iota(out.permutation.begin(), out.permutation.end(), Index{0});
  std::sort(out.permutation.begin(), out.permutation.end(),
            [&](Index a, Index b) { return ranks_before(s, a, b); });
  return out;
}

RankedList RankedList::top(const Vector& s, Index depth,
                           const std::vector<bool>* excluded) {
  RankedList out;
  out.permutation.reserve(static_cast<std::size_t>(s.size()));
  for (Index j = 0; j < s.size(); ++j) {
    if (excluded == nullptr || !(*excluded)[j]) out.permutation.push_back(j);
  }
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(depth),
                                          out.permutation.size());
  std::partial_sort(out.permutation.begin(), out.permutation.begin() + keep,
                    out.permutation.end(),
                    [&](Index a, Index b) { return ranks_before(s, a, b); });
  out.permutation.resize(keep);
  return out;
}

double MetricsReport::value(const std::string& metric, Index cutoff) const {
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (cutoffs[i] != cutoff) continue;
    if (metric == "precision") return precision[i];
    if (metric == "recall") return recall[i];
    if (metric == "ndcg") return ndcg[i];
    if (metric == "topk_error") return topk_error[i];
    throw UsageError("unknown metric: " + metric);
  }
  throw UsageError("cutoff not evaluated");
}

MetricsReport evaluate_ranking(const std::vector<Index>& ranking,
                               const std::vector<Index>& relevant,
                               const std::vector<Index>& cutoffs) {
  if (relevant.empty()) throw DomainError("no relevant items");
  const std::unordered_set<Index> rel(relevant.begin(), relevant.end());
  const double count = static_cast<double>(rel.size());
  MetricsReport r;
  r.cutoffs = cutoffs;
  for (Index k : cutoffs) {
    if (k < 1) throw DomainError("cutoff must be positive");
    double hits = 0.0;
    double dcg = 0.0;
    const Index depth = std::min<Index>(k, static_cast<Index>(ranking.size()));
    for (Index i = 0; i < depth; ++i) {
      if (rel.count(ranking[i]) != 0) {
        hits += 1.0;
        dcg += dcg_weight(i + 1);
      }
    }
    double idcg = 0.0;
    const Index ideal = std::min<Index>(k, static_cast<Index>(rel.size()));
    for (Index i = 1; i <= ideal; ++i) idcg += dcg_weight(i);
    r.precision.push_back(hits / static_cast<double>(k));
    r.recall.push_back(hits / count);
    r.ndcg.push_back(dcg / idcg);
    r.topk_error.push_back(hits > 0.0 ? 0.0 : 1.0);
  }
  return r;
}

MetricsReport evaluate(const Vector& s, const LabelVector& y,
                       const std::vector<Index>& cutoffs) {
  if (y.size() != s.size()) throw UsageError("label and score lengths differ");
  for (Index k : cutoffs) {
    if (k > s.size()) throw DomainError("cutoff exceeds the number of classes");
  }
  return evaluate_ranking(RankedList::rank(s).permutation, y.positives(),
                          cutoffs);
}

MetricsReport average(const std::vector<MetricsReport>& reports) {
  MetricsReport out;
  if (reports.empty()) return out;
  out = reports.front();
  for (std::size_t u = 1; u < reports.size(); ++u) {
    const MetricsReport& r = reports[u];
    if (r.cutoffs != out.cutoffs) throw UsageError("cutoff lists differ");
    for (std::size_t i = 0; i < out.cutoffs.size(); ++i) {
      out.precision[i] += r.precision[i];
      out.recall[i] += r.recall[i];
      out.ndcg[i] += r.ndcg[i];
      out.topk_error[i] += r.topk_error[i];
    }
  }
  const double n = static_cast<double>(reports.size());
  for (std::size_t i = 0; i < out.cutoffs.size(); ++i) {
    out.precision[i] /= n;
    out.recall[i] /= n;
    out.ndcg[i] /= n;
    out.topk_error[i] /= n;
  }
  return out;
}

std::vector<std::string> to_csv_rows(const MetricsReport& report,
                                     Index user_count) {
  std::vector<std::string> rows;
  char buf[128];
  auto emit = [&](Index k, const char* name, double v) {
    std::snprintf(buf, sizeof(buf), "%lld,%lld,%s,%.10g",
                  static_cast<long long>(user_count), static_cast<long long>(k),
                  name, v);
    rows.emplace_back(buf);
  };
  for (std::size_t i = 0; i < report.cutoffs.size(); ++i) {
    emit(report.cutoffs[i], "precision", report.precision[i]);
    emit(report.cutoffs[i], "recall", report.recall[i]);
    emit(report.cutoffs[i], "ndcg", report.ndcg[i]);
    emit(report.cutoffs[i], "topk_error", report.topk_error[i]);
  }
  return rows;
}

TieDcg expected_tie_dcg(const TieBlock& block) {
  if (block.m < 1 || block.z < 0 || block.r < 0 || block.r > block.m) {
    throw DomainError("invalid tie block");
  }
  TieDcg out;
  double block_weight = 0.0;
  for (Index i = 1; i <= block.m; ++i) {
    const double w = dcg_weight(block.z + i);
    block_weight += w;
    if (i <= block.r) out.optimal += w;
  }
  out.expected = static_cast<double>(block.r) / static_cast<double>(block.m) *
                 block_weight;
  out.gap = out.optimal - out.expected;
  return out;
}

AlignmentGap wop_alignment_gap(const Vector& s, const LabelVector& y,
                               const MappingKind& mapping) {
  check_scores(s);
  if (y.size() != s.size()) throw UsageError("label and score lengths differ");
  const Vector p = apply_mapping(s, mapping).probabilities;
  const Vector p_tilde = softmax_map(s);
  const Vector grad = p - y.normalized();
  Vector grad_plus = grad;
  std::vector<bool> zeroed(static_cast<std::size_t>(s.size()), false);
  for (Index j = 0; j < s.size(); ++j) {
    if (p[j] == 0.0 && !y.is_relevant(j)) {
      zeroed[j] = true;
      grad_plus[j] = p_tilde[j];
    }
  }

  // d = sum_{pos i} sum_{neg j} w(rank i) (e_j - e_i)
  const RankedList ranked = RankedList::rank(s);
  const double negatives = static_cast<double>(s.size() - y.relevant_count());
  Vector d = Vector::Zero(s.size());
  double weight_total = 0.0;
  for (Index pos = 0; pos < s.size(); ++pos) {
    const Index cls = ranked.permutation[pos];
    if (!y.is_relevant(cls)) continue;
    const double w = dcg_weight(pos + 1);
    d[cls] -= w * negatives;
    weight_total += w;
  }
  for (Index j = 0; j < s.size(); ++j) {
    if (!y.is_relevant(j)) d[j] += weight_total;
  }

  AlignmentGap out;
  out.inner = grad.dot(d);
  out.comparator_inner = grad_plus.dot(d);
  out.gap = out.comparator_inner - out.inner;
  for (Index j = 0; j < s.size(); ++j) {
    if (zeroed[j]) out.double_sum += weight_total * p_tilde[j];
  }
  return out;
}

}  // namespace fybench
