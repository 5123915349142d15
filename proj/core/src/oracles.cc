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

#include "fybench/oracles.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace fybench {

Index rankmax_anchor(const Vector& p) {
  Index best = 0;
  for (Index i = 1; i < p.size(); ++i) {
    if (p[i] > p[best]) best = i;
  }
  return best;
}

Vector bayes_optimal_scores(const Vector& p, const MappingKind& mapping) {
  if (p.size() < 2) throw DomainError("posterior needs at least two classes");
  for (Index i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0) || !std::isfinite(p[i])) {
      throw DomainError("posterior entries must be finite and nonnegative");
    }
  }
  switch (mapping.family) {
    case MappingFamily::kSoftmax: {
      if (p.minCoeff() <= 0.0) {
        throw DomainError("softmax cannot represent a zero probability");
      }
      Vector s = p.array().log().matrix();
      return s.array() - s.mean();
    }
    case MappingFamily::kSparsemax:
      return p;
    case MappingFamily::kEntmax: {
      const double am1 = mapping.alpha - 1.0;
      return p.array().pow(am1).matrix() / am1;
    }
    case MappingFamily::kRankmax: {
      const Index y = rankmax_anchor(p);
      Vector s(p.size());
      for (Index i = 0; i < p.size(); ++i) {
        s[i] = p[i] > 0.0 ? p[i] / p[y] - 1.0 : -2.0;
      }
      s[y] = 0.0;
      return s;
    }
  }
  throw UsageError("unknown mapping family");
}

Vector dirichlet_uniform(Index size, Stream& rng) {
  Vector p(size);
  for (Index i = 0; i < size; ++i) p[i] = rng.exponential();
  return p / p.sum();
}

Vector sparse_posterior(Index size, Index zeros, Stream& rng) {
  if (zeros < 0 || zeros >= size) throw DomainError("need a nonempty support");
  std::vector<Index> order(static_cast<std::size_t>(size));
  std::iota(order.begin(), order.end(), Index{0});
  // Fisher-Yates with the stream so the result is library independent.
  for (Index i = size - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[i], order[j]);
  }
  Vector p = Vector::Zero(size);
  for (Index i = zeros; i < size; ++i) p[order[i]] = rng.exponential();
  return p / p.sum();
}

Index CalibrationVerdict::violations() const {
  Index total = roundtrip_failures;
  for (Index m : topk_matches) total += trials - m;
  if (!support_separation_ok) ++total;
  if (!order_within_support_ok) ++total;
  return total;
}

std::string CalibrationVerdict::to_json() const {
  nlohmann::json doc;
  doc["mapping"] = mapping.name();
  doc["trials"] = trials;
  doc["k_values"] = k_values;
  doc["topk_matches"] = topk_matches;
  doc["roundtrip_failures"] = roundtrip_failures;
  doc["support_separation_ok"] = support_separation_ok;
  doc["order_within_support_ok"] = order_within_support_ok;
  doc["violations"] = violations();
  doc["counterexamples"] = counterexamples;
  return doc.dump(2);
}

namespace {

std::vector<Index> top_k(const Vector& v, Index k) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return v[a] > v[b]; });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

std::string describe(const Vector& p, const std::string& what) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at p = [";
  for (Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << "]";
  return os.str();
}

}  // namespace

CalibrationVerdict check_topk_calibration(const MappingKind& mapping,
                                          Index num_classes,
                                          const std::vector<Index>& k_values,
                                          Index trials, std::uint64_t seed) {
  if (num_classes < 2 || num_classes > 12) {
    throw DomainError("calibration enumeration supports 2 <= C <= 12");
  }
  for (Index k : k_values) {
    if (k < 1 || k > num_classes) throw DomainError("k out of range");
  }
  CalibrationVerdict v;
  v.mapping = mapping;
  v.k_values = k_values;
  v.topk_matches.assign(k_values.size(), 0);
  auto note = [&](const Vector& p, const std::string& what) {
    if (v.counterexamples.size() < 10) v.counterexamples.push_back(describe(p, what));
  };

  const Index sparse_trials = mapping.is_sparse() ? trials : 0;
  for (Index t = 0; t < trials + sparse_trials; ++t) {
    Stream rng(seed, static_cast<std::uint64_t>(t));
    const Vector p =
        t < trials ? dirichlet_uniform(num_classes, rng)
                   : sparse_posterior(num_classes,
                                      1 + static_cast<Index>(rng.below(
                                              static_cast<std::uint64_t>(num_classes - 1))),
                                      rng);
    ++v.trials;
    const Vector s = bayes_optimal_scores(p, mapping);
    MappingKind kind = mapping;
    if (kind.family == MappingFamily::kRankmax) kind.true_class = rankmax_anchor(p);
    const Vector back = apply_mapping(s, kind).probabilities;
    if ((back - p).cwiseAbs().maxCoeff() > 1e-9) {
      ++v.roundtrip_failures;
      note(p, "round trip");
    }

    std::vector<Index> support;
    for (Index i = 0; i < num_classes; ++i) {
      if (p[i] > 0.0) support.push_back(i);
    }
    const auto m = static_cast<Index>(support.size());

    if (m < num_classes) {
      double min_in = kInf;
      double max_out = -kInf;
      for (Index i = 0; i < num_classes; ++i) {
        if (p[i] > 0.0) {
          min_in = std::min(min_in, s[i]);
        } else {
          max_out = std::max(max_out, s[i]);
        }
      }
      if (!(min_in > max_out)) {
        v.support_separation_ok = false;
        note(p, "support separation");
      }
    }
    for (Index a : support) {
      for (Index b : support) {
        if (p[a] > p[b] && !(s[a] > s[b])) {
          if (v.order_within_support_ok) note(p, "order within support");
          v.order_within_support_ok = false;
        }
      }
    }

    for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
      const Index k = k_values[ki];
      const std::vector<Index> by_scores = top_k(s, k);
      bool ok;
      if (k <= m) {
        ok = by_scores == top_k(p, k);
      } else {
        ok = std::includes(by_scores.begin(), by_scores.end(), support.begin(),
                           support.end());
      }
      if (ok) {
        ++v.topk_matches[ki];
      } else {
        note(p, "top-" + std::to_string(k));
      }
    }
  }
  return v;
}

double grad_check(const LossEvaluator& loss, const Vector& s, double h) {
  if (!(h >= 1e-8 && h <= 1e-3)) throw DomainError("h must lie in [1e-8, 1e-3]");
  const Vector g = loss(s).gradient;
  if (g.size() != s.size()) throw UsageError("gradient length mismatch");
  const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-8);
  double worst = 0.0;
  Vector probe = s;
  for (Index i = 0; i < s.size(); ++i) {
    probe[i] = s[i] + h;
    const double up = loss(probe).value;
    probe[i] = s[i] - h;
    const double down = loss(probe).value;
    probe[i] = s[i];
    const double fd = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / scale);
  }
  return worst;
}

bool near_kink(const Vector& s, const MappingKind& mapping, double h) {
  return boundary_distance(s, mapping) < 10.0 * h;
}

Vector posterior_matching_descent(const Vector& p, int max_iterations,
                                  double tolerance) {
  Vector s = Vector::Zero(p.size());
  // The objective is 1/2-smooth, so a unit step is safe.
  for (int it = 0; it < max_iterations; ++it) {
    const Vector grad = softmax_map(s) - p;
    if (grad.cwiseAbs().maxCoeff() < tolerance) break;
    s -= grad;
  }
  return softmax_map(s);
}

}  // namespace fybench
