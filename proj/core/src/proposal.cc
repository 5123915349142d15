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

#include "fybench/proposal.h"

#include <algorithm>
#include <sstream>

namespace fybench {

AliasTable::AliasTable(const Vector& probabilities) {
  const Index n = probabilities.size();
  if (n == 0) throw DomainError("alias table needs at least one outcome");
  const double total = probabilities.sum();
  prob_.assign(static_cast<std::size_t>(n), 0.0);
  alias_.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> scaled(static_cast<std::size_t>(n));
  std::vector<Index> small;
  std::vector<Index> large;
  for (Index i = 0; i < n; ++i) {
    scaled[i] = probabilities[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const Index lo = small.back();
    small.pop_back();
    const Index hi = large.back();
    prob_[lo] = scaled[lo];
    alias_[lo] = hi;
    scaled[hi] = (scaled[hi] + scaled[lo]) - 1.0;
    if (scaled[hi] < 1.0) {
      large.pop_back();
      small.push_back(hi);
    }
  }
  for (Index i : large) prob_[i] = 1.0, alias_[i] = i;
  for (Index i : small) prob_[i] = 1.0, alias_[i] = i;
  flat_ = std::all_of(prob_.begin(), prob_.end(), [](double p) { return p == 1.0; });
}

Index AliasTable::sample(Stream& rng) const {
  const Index column = static_cast<Index>(rng.below(prob_.size()));
  const double u = rng.uniform();
  if (flat_) return column;
  return u < prob_[column] ? column : alias_[column];
}

namespace {

void check_proposal(const Vector& q) {
  for (Index j = 0; j < q.size(); ++j) {
    if (!(q[j] > 0.0) || !std::isfinite(q[j])) {
      throw DomainError("proposal probabilities must be positive");
    }
  }
}

}  // namespace

ProposalDist ProposalDist::Uniform(Index num_classes) {
  if (num_classes < 1) throw DomainError("proposal needs C >= 1");
  ProposalDist d;
  d.kind_ = ProposalKind::kUniform;
  d.probabilities_ =
      Vector::Constant(num_classes, 1.0 / static_cast<double>(num_classes));
  d.table_ = AliasTable(d.probabilities_);
  return d;
}

ProposalDist ProposalDist::LogUniform(Index num_classes) {
  if (num_classes < 1) throw DomainError("proposal needs C >= 1");
  ProposalDist d;
  d.kind_ = ProposalKind::kLogUniform;
  d.probabilities_.resize(num_classes);
  for (Index j = 0; j < num_classes; ++j) {
    d.probabilities_[j] = 1.0 / static_cast<double>(j + 2);
  }
  d.probabilities_ /= d.probabilities_.sum();
  d.table_ = AliasTable(d.probabilities_);
  return d;
}

ProposalDist ProposalDist::Empirical(const Vector& weights) {
  if (weights.size() < 1) throw DomainError("proposal needs C >= 1");
  const double total = weights.sum();
  if (!(total > 0.0)) throw DomainError("empirical proposal has no mass");
  ProposalDist d;
  d.kind_ = ProposalKind::kEmpirical;
  d.probabilities_ = weights / total;
  check_proposal(d.probabilities_);
  d.table_ = AliasTable(d.probabilities_);
  return d;
}

ProposalDist ProposalDist::Dns(Index num_classes, Index pool, Index top) {
  if (num_classes < 1) throw DomainError("proposal needs C >= 1");
  if (pool < top || top < 1) throw DomainError("DNS requires pool >= top >= 1");
  ProposalDist d = Uniform(num_classes);
  d.kind_ = ProposalKind::kDns;
  d.pool_ = pool;
  d.top_ = top;
  return d;
}

std::string ProposalDist::name() const {
  switch (kind_) {
    case ProposalKind::kUniform:
      return "uniform";
    case ProposalKind::kLogUniform:
      return "loguniform";
    case ProposalKind::kEmpirical:
      return "empirical";
    case ProposalKind::kDns: {
      std::ostringstream os;
      os << "dns" << pool_ << "_" << top_;
      return os.str();
    }
  }
  return "unknown";
}

Index ProposalDist::sample(Stream& rng) const {
  if (kind_ == ProposalKind::kDns) {
    throw UsageError("DNS proposal needs model scores; use draw_dns");
  }
  return table_.sample(rng);
}

SampleDraw draw_negatives(const ProposalDist& q, Index k, Stream& rng) {
  if (k < 1) throw DomainError("need at least one negative");
  SampleDraw draw;
  draw.negatives.resize(static_cast<std::size_t>(k));
  for (auto& n : draw.negatives) n = q.sample(rng);
  return draw;
}

SampleDraw draw_negatives(const ProposalDist& q, Index k, std::uint64_t seed,
                          std::uint64_t example_index) {
  Stream rng(seed, example_index);
  return draw_negatives(q, k, rng);
}

}  // namespace fybench
