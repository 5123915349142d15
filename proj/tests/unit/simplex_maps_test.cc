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

#include "fybench/simplex_maps.h"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

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

TEST(Softmax, UniformLogits) {
  const Vector p = softmax_map(vec({0, 0, 0}));
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(p[i], 1.0 / 3.0, 1e-15);
}

TEST(Softmax, LogRatios) {
  const Vector p = softmax_map(vec({0, std::log(2.0), std::log(3.0)}));
  EXPECT_NEAR(p[0], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(p[1], 2.0 / 6.0, 1e-15);
  EXPECT_NEAR(p[2], 3.0 / 6.0, 1e-15);
}

TEST(Softmax, LargeLogitsStayFinite) {
  const Vector p = softmax_map(vec({1000, 1000, 999}));
  ASSERT_TRUE(p.allFinite());
  EXPECT_EQ(p[0], p[1]);
  const Vector shifted = naive::softmax(vec({0, 0, -1}));
  EXPECT_NEAR((p - shifted).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(Softmax, RejectsNonFinite) {
  EXPECT_THROW(softmax_map(vec({0, NAN})), DomainError);
  EXPECT_THROW(softmax_map(Vector()), DomainError);
}

TEST(Sparsemax, SymmetricPair) {
  const MapResult r = sparsemax_map(vec({0, 0}));
  EXPECT_DOUBLE_EQ(r.probabilities[0], 0.5);
  EXPECT_DOUBLE_EQ(r.probabilities[1], 0.5);
  EXPECT_DOUBLE_EQ(r.support.threshold, -0.5);
  EXPECT_EQ(r.support.size(), 2);
}

TEST(Sparsemax, UnitGapGivesVertex) {
  const MapResult r = sparsemax_map(vec({1, 0}));
  EXPECT_EQ(r.probabilities[0], 1.0);
  EXPECT_EQ(r.probabilities[1], 0.0);
  EXPECT_DOUBLE_EQ(r.support.threshold, 0.0);
  EXPECT_EQ(r.support.size(), 1);
}

TEST(Sparsemax, MatchesBisectionProjection) {
  const MapResult r = sparsemax_map(vec({1.5, 0.3, -2.0}));
  const Vector oracle = naive::sparsemax(vec({1.5, 0.3, -2.0}));
  EXPECT_NEAR((r.probabilities - oracle).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  EXPECT_EQ(r.support.size(), 1);

  Stream rng(3);
  for (int t = 0; t < 200; ++t) {
    const Vector s = gaussian(2 + t % 9, 1.5, rng);
    const Vector p = sparsemax_map(s).probabilities;
    EXPECT_NEAR((p - naive::sparsemax(s)).cwiseAbs().maxCoeff(), 0.0, 1e-10);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
  }
}

TEST(Entmax, AlphaTwoIsSparsemax) {
  Stream rng(5);
  for (int t = 0; t < 100; ++t) {
    const Vector s = gaussian(6, 1.0, rng);
    const Vector a = entmax_map(s, 2.0).probabilities;
    const Vector b = sparsemax_map(s).probabilities;
    EXPECT_NEAR((a - b).cwiseAbs().maxCoeff(), 0.0, 1e-9);
  }
}

TEST(Entmax, UniformAndSoftmaxLimit) {
  const Vector p = entmax_map(vec({0, 0, 0, 0}), 1.5).probabilities;
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(p[i], 0.25, 1e-12);
  const Vector s = vec({1, 2, 3});
  const Vector near_one = entmax_map(s, 1.0001).probabilities;
  EXPECT_NEAR((near_one - naive::softmax(s)).cwiseAbs().maxCoeff(), 0.0, 1e-3);
}

TEST(Entmax, MatchesBisection) {
  Stream rng(7);
  for (double alpha : {1.25, 1.5, 1.75}) {
    for (int t = 0; t < 50; ++t) {
      const Vector s = gaussian(7, 2.0, rng);
      const Vector p = entmax_map(s, alpha).probabilities;
      EXPECT_NEAR((p - naive::entmax(s, alpha)).cwiseAbs().maxCoeff(), 0.0, 1e-9) << alpha;
    }
  }
}

TEST(Entmax, RejectsAlphaOutOfRange) {
  EXPECT_ANY_THROW(entmax_map(vec({0, 1}), 1.0));
  EXPECT_ANY_THROW(entmax_map(vec({0, 1}), 2.5));
}

TEST(Rankmax, Examples) {
  const Vector a = rankmax_map(vec({0, 0, 0}), 0).probabilities;
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(a[i], 1.0 / 3.0, 1e-15);
  const Vector b = rankmax_map(vec({2, 0, 0}), 0).probabilities;
  EXPECT_EQ(b[0], 1.0);
  EXPECT_EQ(b[1], 0.0);
  EXPECT_EQ(b[2], 0.0);
  const Vector c = rankmax_map(vec({0, 0.5, 0}), 0).probabilities;
  EXPECT_NEAR(c[0], 2.0 / 7.0, 1e-15);
  EXPECT_NEAR(c[1], 3.0 / 7.0, 1e-15);
  EXPECT_NEAR(c[2], 2.0 / 7.0, 1e-15);
}

TEST(Rankmax, MatchesDirectFormula) {
  Stream rng(11);
  for (int t = 0; t < 100; ++t) {
    const Vector s = gaussian(8, 1.0, rng);
    const Index y = t % 8;
    const MapResult r = rankmax_map(s, y);
    EXPECT_NEAR((r.probabilities - naive::rankmax(s, y)).cwiseAbs().maxCoeff(), 0.0, 1e-14);
    EXPECT_GT(r.probabilities[y], 0.0);
  }
}

TEST(Jacobian, SoftmaxAtOrigin) {
  const JacobianMatrix j = jacobian(vec({0, 0}), MappingKind::Softmax());
  EXPECT_NEAR(j.entries(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(j.entries(0, 1), -0.25, 1e-15);
  EXPECT_NEAR(j.entries(1, 0), -0.25, 1e-15);
  EXPECT_NEAR(j.entries(1, 1), 0.25, 1e-15);
}

TEST(Jacobian, SparsemaxBlockIsCenteringProjector) {
  const Vector s = vec({1.0, 0.9, 0.8, -3.0, -4.0});
  const JacobianMatrix j = jacobian(s, MappingKind::Sparsemax());
  ASSERT_EQ(j.support.size(), 3);
  for (Index r = 0; r < 5; ++r) {
    for (Index c = 0; c < 5; ++c) {
      const double expect = (r < 3 && c < 3) ? (r == c ? 1.0 : 0.0) - 1.0 / 3.0 : 0.0;
      EXPECT_NEAR(j.entries(r, c), expect, 1e-15);
      if (r >= 3 || c >= 3) EXPECT_EQ(j.entries(r, c), 0.0);
    }
  }
}

TEST(Jacobian, MatchesFiniteDifferences) {
  Stream rng(13);
  const double h = 1e-6;
  std::vector<MappingKind> kinds = {MappingKind::Softmax(), MappingKind::Sparsemax(),
                                    MappingKind::Entmax(1.5), MappingKind::Entmax(1.25),
                                    MappingKind::Rankmax(2)};
  for (const MappingKind& kind : kinds) {
    int checked = 0;
    while (checked < 30) {
      const Vector s = gaussian(6, 1.0, rng);
      if (boundary_distance(s, kind) < 1e-4) continue;
      const JacobianMatrix j = jacobian(s, kind);
      const naive::Mat fd = naive::fd_jacobian(
          [&](const Vector& x) { return apply_mapping(x, kind).probabilities; }, s, h);
      const double scale = std::max(fd.cwiseAbs().maxCoeff(), 1e-8);
      EXPECT_LE((j.entries - fd).cwiseAbs().maxCoeff() / scale, 1e-4) << kind.name();
      ++checked;
    }
  }
}

TEST(Jacobian, FlagsBoundaryProximity) {
  // sparsemax of [1, 0] sits exactly on the support boundary.
  EXPECT_TRUE(jacobian(vec({1, 0}), MappingKind::Sparsemax()).near_boundary);
  EXPECT_FALSE(jacobian(vec({0.3, 0}), MappingKind::Sparsemax()).near_boundary);
}

TEST(SpectralNorm, IdentityAndBounds) {
  EXPECT_NEAR(spectral_norm(Matrix::Identity(2, 2)).value, 1.0, 1e-12);
  Stream rng(17);
  for (int t = 0; t < 200; ++t) {
    const Index c = 2 + t % 30;
    const Vector s = gaussian(c, 2.0, rng);
    const Matrix j = jacobian(s, MappingKind::Softmax()).entries;
    const double norm = spectral_norm(j).value;
    EXPECT_LE(norm, 0.5 + 1e-9);
    Eigen::SelfAdjointEigenSolver<Matrix> es(j);
    EXPECT_NEAR(norm, es.eigenvalues().cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(OrderPreservation, SoftmaxIsStrict) {
  const OrderReport r = classify_order_preservation(MappingKind::Softmax(), 10000, 1);
  EXPECT_EQ(r.verdict, OrderVerdict::kSopConsistent);
  EXPECT_EQ(r.inversion_count, 0);
  EXPECT_EQ(r.tie_witness_count, 0);
}

TEST(OrderPreservation, SparseMappingsTieButNeverInvert) {
  for (const MappingKind& kind :
       {MappingKind::Sparsemax(), MappingKind::Entmax(1.5), MappingKind::Rankmax(0)}) {
    const OrderReport r = classify_order_preservation(kind, 10000, 2, 5);
    EXPECT_EQ(r.verdict, OrderVerdict::kWopWitnessed) << kind.name();
    EXPECT_EQ(r.inversion_count, 0);
    ASSERT_TRUE(r.tie_witness.has_value());
    const OrderWitness& w = *r.tie_witness;
    EXPECT_GT(w.scores[w.i], w.scores[w.j]);
    EXPECT_EQ(w.probabilities[w.i], w.probabilities[w.j]);
  }
}

}  // namespace
}  // namespace fybench
