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
#include <functional>
#include <map>

#include <gtest/gtest.h>

#include "fybench/fy_losses.h"
#include "fybench/proposal.h"
#include "fybench/random.h"
#include "unit/naive.h"

namespace fybench {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Vector gaussian(Index c, double scale, Stream& rng) {
  Vector s(c);
  for (Index i = 0; i < c; ++i) s[i] = scale * rng.normal();
  return s;
}

double softplus_ref(double x) { return std::log1p(std::exp(x)); }

TEST(Proposal, Probabilities) {
  const ProposalDist u = ProposalDist::Uniform(4);
  EXPECT_DOUBLE_EQ(u.q(3), 0.25);
  const ProposalDist lu = ProposalDist::LogUniform(3);
  const double z = 1.0 / 2 + 1.0 / 3 + 1.0 / 4;
  EXPECT_NEAR(lu.q(0), 0.5 / z, 1e-15);
  EXPECT_NEAR(lu.q(2), 0.25 / z, 1e-15);
  const ProposalDist e = ProposalDist::Empirical(vec({1, 3}));
  EXPECT_DOUBLE_EQ(e.q(1), 0.75);
  EXPECT_ANY_THROW(ProposalDist::Empirical(vec({1, 0})));
  EXPECT_ANY_THROW(ProposalDist::Dns(10, 5, 6));
}

TEST(Proposal, AliasFrequenciesMatch) {
  const ProposalDist q = ProposalDist::Empirical(vec({1, 2, 3, 4, 10}));
  Stream rng(9);
  std::vector<double> counts(5, 0.0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) counts[static_cast<std::size_t>(q.sample(rng))] += 1.0;
  for (Index j = 0; j < 5; ++j) {
    const double p = q.q(j);
    const double se = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(counts[static_cast<std::size_t>(j)] / n, p, 5 * se);
  }
}

TEST(Proposal, DrawsAreReproducible) {
  const ProposalDist q = ProposalDist::LogUniform(50);
  const SampleDraw a = draw_negatives(q, 20, 7, 3);
  const SampleDraw b = draw_negatives(q, 20, 7, 3);
  const SampleDraw c = draw_negatives(q, 20, 7, 4);
  EXPECT_EQ(a.negatives, b.negatives);
  EXPECT_NE(a.negatives, c.negatives);
  Stream rng(1);
  EXPECT_ANY_THROW(ProposalDist::Dns(50).sample(rng));
}

TEST(Proposal, DnsKeepsTopScores) {
  Stream rng(4);
  const Vector scores = gaussian(30, 1.0, rng);
  Stream a(5);
  const SampleDraw d = draw_dns(30, 40, 5, a, [&](Index c) { return scores[c]; });
  ASSERT_EQ(d.k(), 5);
  // Replay the candidate stream and check against a naive sort.
  Stream b(5);
  std::vector<std::pair<double, Index>> cand;
  for (int i = 0; i < 40; ++i) {
    const auto c = static_cast<Index>(b.below(30));
    cand.emplace_back(scores[c], c);
  }
  std::stable_sort(cand.begin(), cand.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (Index i = 0; i < 5; ++i) EXPECT_EQ(d.negatives[static_cast<std::size_t>(i)], cand[static_cast<std::size_t>(i)].second);
}

TEST(SsmSimple, Examples) {
  SampleDraw draw;
  draw.negatives = {1, 2, 2, 0};
  EXPECT_NEAR(ssm_simple_loss(Vector::Zero(5), 3, draw).value, std::log(5.0), 1e-15);

  draw.negatives = {1};
  EXPECT_NEAR(ssm_simple_loss(vec({1, 0, 0}), 0, draw).value,
              -std::log(std::exp(1.0) / (std::exp(1.0) + 1.0)), 1e-15);

  Stream rng(2);
  const Vector s = gaussian(6, 1.0, rng);
  draw.negatives = {0, 1, 2, 4, 5};
  EXPECT_NEAR(ssm_simple_loss(s, 3, draw).value, naive::lse(s) - s[3], 1e-12);
}

TEST(SsmCorrected, UniformEqualsSimple) {
  Stream rng(3);
  const ProposalDist q = ProposalDist::Uniform(12);
  for (int t = 0; t < 20; ++t) {
    const Vector s = gaussian(12, 1.0, rng);
    const SampleDraw draw = draw_negatives(q, 7, 11, static_cast<std::uint64_t>(t));
    const LossEval a = ssm_corrected_loss(s, 4, draw, q);
    const LossEval b = ssm_simple_loss(s, 4, draw);
    EXPECT_NEAR(a.value, b.value, 1e-12);
    EXPECT_NEAR((a.gradient - b.gradient).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  }
}

TEST(SsmCorrected, ImportanceWeightedPartitionIsUnbiased) {
  Stream rng(4);
  const Vector s = gaussian(20, 1.0, rng);
  const ProposalDist q = ProposalDist::LogUniform(20);
  double z = 0.0;
  for (Index j = 0; j < 20; ++j) z += std::exp(s[j]);
  const int n = 100000;
  double mean = 0.0;
  double m2 = 0.0;
  Stream draws(6);
  for (int i = 1; i <= n; ++i) {
    const Index j = q.sample(draws);
    const double x = std::exp(s[j]) / q.q(j);
    const double d = x - mean;
    mean += d / i;
    m2 += d * (x - mean);
  }
  const double se = std::sqrt(m2 / (n - 1) / n);
  EXPECT_NEAR(mean, z, 3 * se);
}

TEST(SsmCorrected, LargeKApproachesSoftmax) {
  Stream rng(5);
  const Vector s = gaussian(20, 1.0, rng);
  const ProposalDist q = ProposalDist::LogUniform(20);
  const double exact = naive::lse(s) - s[7];
  double mean = 0.0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    mean += ssm_corrected_loss(s, 7, draw_negatives(q, 10000, 3, static_cast<std::uint64_t>(r)), q)
                .value / reps;
  }
  // Correcting the positive too shifts the asymptote by the constant log(k q(y)).
  const double target = exact + std::log(10000.0 * q.q(7));
  EXPECT_NEAR(mean, target, 0.01 * std::abs(target));
}

TEST(SampledLosses, GradientsMatchFiniteDifferences) {
  Stream rng(6);
  const ProposalDist q = ProposalDist::LogUniform(9);
  for (int t = 0; t < 30; ++t) {
    const Vector s = gaussian(9, 1.0, rng);
    const SampleDraw draw = draw_negatives(q, 6, 5, static_cast<std::uint64_t>(t));
    const Index y = t % 9;
    using Fn = std::function<LossEval(const Vector&)>;
    for (const Fn& f : {Fn([&](const Vector& x) { return ssm_simple_loss(x, y, draw); }),
                        Fn([&](const Vector& x) { return ssm_corrected_loss(x, y, draw, q); }),
                        Fn([&](const Vector& x) { return nce_loss(x, y, draw, q); })}) {
      const LossEval e = f(s);
      const Vector fd =
          naive::fd_gradient([&](const Vector& x) { return f(x).value; }, s, 1e-5);
      EXPECT_LE((fd - e.gradient).cwiseAbs().maxCoeff() /
                    std::max(e.gradient.cwiseAbs().maxCoeff(), 1e-8),
                1e-6);
      // Only the positive and drawn classes receive gradient.
      for (Index j = 0; j < 9; ++j) {
        const bool drawn = j == y || std::find(draw.negatives.begin(), draw.negatives.end(),
                                               j) != draw.negatives.end();
        if (!drawn) EXPECT_EQ(e.gradient[j], 0.0);
      }
    }
  }
}

TEST(Nce, Examples) {
  const Index c = 8;
  const ProposalDist q = ProposalDist::Uniform(c);
  SampleDraw draw;
  for (Index j = 0; j < c; ++j) draw.negatives.push_back(j);
  EXPECT_NEAR(nce_loss(Vector::Zero(c), 2, draw, q).value, (c + 1) * std::log(2.0), 1e-12);

  const double a = 0.7;
  const double b = -0.4;
  SampleDraw one;
  one.negatives = {1};
  const ProposalDist q2 = ProposalDist::Uniform(2);
  const double expect = softplus_ref(-a + std::log(0.5)) + softplus_ref(b - std::log(0.5));
  EXPECT_NEAR(nce_loss(vec({a, b}), 0, one, q2).value, expect, 1e-14);
}

TEST(Nce, PerTermCurvatureBoundedByQuarter) {
  const ProposalDist q = ProposalDist::Uniform(2);
  SampleDraw one;
  one.negatives = {1};
  const double h = 1e-4;
  for (double x = -6.0; x <= 6.0; x += 0.05) {
    for (Index coord : {0, 1}) {
      auto f = [&](double v) {
        Vector s = vec({0.3, -0.2});
        s[coord] = v;
        return nce_loss(s, 0, one, q).value;
      };
      const double second = (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
      EXPECT_LE(second, 0.25 + 1e-6);
    }
  }
}

TEST(RgSurrogate, Examples) {
  for (Index c : {3, 10}) {
    const double logc = std::log(static_cast<double>(c));
    EXPECT_NEAR(rg_partition(Vector::Zero(c)), logc, 1e-15);
    EXPECT_NEAR(rg_partition(Vector::Constant(c, 2.5)), logc + 2.5, 1e-12);
    EXPECT_NEAR(rg_loss(Vector::Zero(c), LabelVector::one_hot(c, 1)).value, logc, 1e-15);
    EXPECT_NEAR(rg_loss(Vector::Constant(c, -1.5), LabelVector::one_hot(c, 1)).value, logc,
                1e-12);
  }
}

TEST(RgSurrogate, SecondOrderTaylorOfLogSumExp) {
  // Independent form: log C + mean(s) + var(s) / 2 with the population variance.
  Stream rng(7);
  for (int t = 0; t < 20; ++t) {
    const Vector s = gaussian(10, 1.0, rng);
    const double mean = s.mean();
    const double var = (s.array() - mean).square().mean();
    EXPECT_NEAR(rg_partition(s), std::log(10.0) + mean + 0.5 * var, 1e-12);
  }
}

TEST(RgSurrogate, GradientMatchesFiniteDifferences) {
  Stream rng(8);
  for (int t = 0; t < 20; ++t) {
    const Vector s = gaussian(10, 1.0, rng);
    const LabelVector y = LabelVector::one_hot(10, t % 10);
    const LossEval e = rg_loss(s, y);
    const Vector fd =
        naive::fd_gradient([&](const Vector& x) { return rg_loss(x, y).value; }, s, 1e-4);
    EXPECT_LE((fd - e.gradient).cwiseAbs().maxCoeff() / e.gradient.cwiseAbs().maxCoeff(), 1e-6);
  }
}

}  // namespace
}  // namespace fybench
