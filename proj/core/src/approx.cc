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

#include "fybench/approx.h"

#include <algorithm>
#include <cmath>

namespace fybench {

CompactEval sampled_softmax_compact(std::span<const double> logits) {
  CompactEval out;
  out.gradient.resize(logits.size());
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.gradient[i] = std::exp(logits[i] - top);
    total += out.gradient[i];
  }
  out.value = top + std::log(total) - logits[0];
  for (double& g : out.gradient) g /= total;
  out.gradient[0] -= 1.0;
  return out;
}

CompactEval nce_compact(std::span<const double> logits,
                        std::span<const double> log_kq) {
  CompactEval out;
  out.gradient.resize(logits.size());
  const double pos = logits[0] - log_kq[0];
  out.value = softplus(-pos);
  out.gradient[0] = -sigmoid(-pos);
  for (std::size_t i = 1; i < logits.size(); ++i) {
    const double neg = logits[i] - log_kq[i];
    out.value += softplus(neg);
    out.gradient[i] = sigmoid(neg);
  }
  return out;
}

namespace {

void check_draw(const Vector& s, Index y, const SampleDraw& draw) {
  check_scores(s);
  check_class_index(y, s.size());
  if (draw.k() < 1) throw DomainError("sample draw is empty");
  for (Index j : draw.negatives) check_class_index(j, s.size());
}

LossEval scatter(const CompactEval& c, Index size, Index y,
                 const SampleDraw& draw) {
  LossEval out;
  out.value = c.value;
  out.gradient = Vector::Zero(size);
  out.gradient[y] += c.gradient[0];
  for (std::size_t i = 0; i < draw.negatives.size(); ++i) {
    out.gradient[draw.negatives[i]] += c.gradient[i + 1];
  }
  return out;
}

double log_q(const ProposalDist& q, Index j) {
  const double p = q.q(j);
  if (!(p > 0.0)) throw DomainError("proposal assigns zero probability");
  return std::log(p);
}

}  // namespace

LossEval ssm_simple_loss(const Vector& s, Index y, const SampleDraw& draw) {
  check_draw(s, y, draw);
  std::vector<double> logits;
  logits.reserve(draw.negatives.size() + 1);
  logits.push_back(s[y]);
  for (Index j : draw.negatives) logits.push_back(s[j]);
  return scatter(sampled_softmax_compact(logits), s.size(), y, draw);
}

LossEval ssm_corrected_loss(const Vector& s, Index y, const SampleDraw& draw,
                            const ProposalDist& q) {
  check_draw(s, y, draw);
  if (q.num_classes() != s.size()) throw UsageError("proposal size mismatch");
  std::vector<double> logits;
  logits.reserve(draw.negatives.size() + 1);
  logits.push_back(s[y] - log_q(q, y));
  for (Index j : draw.negatives) logits.push_back(s[j] - log_q(q, j));
  return scatter(sampled_softmax_compact(logits), s.size(), y, draw);
}

LossEval nce_loss(const Vector& s, Index y, const SampleDraw& draw,
                  const ProposalDist& q) {
  check_draw(s, y, draw);
  if (q.num_classes() != s.size()) throw UsageError("proposal size mismatch");
  const double log_k = std::log(static_cast<double>(draw.k()));
  std::vector<double> logits;
  std::vector<double> offsets;
  logits.push_back(s[y]);
  offsets.push_back(log_k + log_q(q, y));
  for (Index j : draw.negatives) {
    logits.push_back(s[j]);
    offsets.push_back(log_k + log_q(q, j));
  }
  return scatter(nce_compact(logits, offsets), s.size(), y, draw);
}

double rg_partition(const Vector& s) {
  const double c = static_cast<double>(s.size());
  const double total = s.sum();
  return std::log(c) + total / c +
         0.5 * (s.squaredNorm() / c - total * total / (c * c));
}

LossEval rg_loss(const Vector& s, const LabelVector& y) {
  if (y.size() != s.size()) {
    throw UsageError("label and score vectors differ in length");
  }
  const double c = static_cast<double>(s.size());
  const double count = static_cast<double>(y.relevant_count());
  LossEval out;
  out.value = count * rg_partition(s) - s.dot(y.values());
  const double shift = 1.0 / c - s.sum() / (c * c);
  out.gradient = count * (s / c + Vector::Constant(s.size(), shift)) - y.values();
  return out;
}

}  // namespace fybench
