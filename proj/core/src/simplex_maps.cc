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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fybench/random.h"

namespace fybench {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) {
    std::ostringstream os;
    os << "entmax alpha must lie in (1, 2], got " << alpha;
    throw DomainError(os.str());
  }
}

// Class indices sorted by descending score; equal scores keep ascending index.
std::vector<Index> descending_order(const Vector& s) {
  std::vector<Index> order(static_cast<std::size_t>(s.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&s](Index a, Index b) { return s[a] > s[b]; });
  return order;
}

SupportInfo support_of(const Vector& p, double threshold) {
  SupportInfo info;
  info.threshold = threshold;
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] > kProbabilityFloor) info.support.push_back(i);
  }
  return info;
}

bool probabilities_tied(double a, double b) {
  if (a == b) return true;
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

MappingKind MappingKind::Entmax(double alpha) {
  check_alpha(alpha);
  return {MappingFamily::kEntmax, alpha, 0};
}

MappingKind MappingKind::Rankmax(Index true_class) {
  if (true_class < 0) throw DomainError("rankmax true class must be >= 0");
  return {MappingFamily::kRankmax, 2.0, true_class};
}

std::string MappingKind::name() const {
  switch (family) {
    case MappingFamily::kSoftmax:
      return "softmax";
    case MappingFamily::kSparsemax:
      return "sparsemax";
    case MappingFamily::kEntmax: {
      std::ostringstream os;
      os << "entmax" << alpha;
      return os.str();
    }
    case MappingFamily::kRankmax:
      return "rankmax";
  }
  return "unknown";
}

MappingKind parse_mapping(const std::string& name, double alpha,
                          Index true_class) {
  if (name == "softmax") return MappingKind::Softmax();
  if (name == "sparsemax") return MappingKind::Sparsemax();
  if (name == "entmax") return MappingKind::Entmax(alpha);
  if (name == "rankmax") return MappingKind::Rankmax(true_class);
  throw UsageError("unknown mapping '" + name + "'");
}

Vector softmax_map(const Vector& s) {
  check_scores(s);
  Vector e = (s.array() - s.maxCoeff()).exp();
  return e / e.sum();
}

MapResult sparsemax_map(const Vector& s) {
  check_scores(s);
  const std::vector<Index> order = descending_order(s);
  double cumulative = 0.0;
  double support_sum = 0.0;
  Index support_size = 0;
  for (Index k = 0; k < s.size(); ++k) {
    const double z = s[order[static_cast<std::size_t>(k)]];
    cumulative += z;
    if (1.0 + static_cast<double>(k + 1) * z > cumulative) {
      support_size = k + 1;
      support_sum = cumulative;
    }
  }
  const double tau = (support_sum - 1.0) / static_cast<double>(support_size);
  Vector p = (s.array() - tau).max(0.0);
  return {p, support_of(p, tau)};
}

MapResult entmax_map(const Vector& s, double alpha, EntmaxOptions opts) {
  check_scores(s);
  check_alpha(alpha);
  const double am1 = alpha - 1.0;
  const double exponent = 1.0 / am1;
  const Index n = s.size();

  // Bisection in the scaled domain x = (alpha - 1) s, where
  // p_i = (x_i - t)_+^{1/(alpha-1)} and the threshold t = (alpha - 1) tau.
  const Vector x = s * am1;
  const double x_max = x.maxCoeff();
  double lo = x_max - 1.0;  // max entry alone reaches mass 1
  double hi = x_max - std::pow(1.0 / static_cast<double>(n), am1);

  Vector p(n);
  auto mass_at = [&](double t) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double d = x[i] - t;
      p[i] = d > 0.0 ? std::pow(d, exponent) : 0.0;
      total += p[i];
    }
    return total;
  };

  double t = 0.5 * (lo + hi);
  double mass = mass_at(t);
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (std::abs(mass - 1.0) <= opts.tolerance) break;
    if (mass > 1.0) {
      lo = t;
    } else {
      hi = t;
    }
    t = 0.5 * (lo + hi);
    mass = mass_at(t);
  }
  p /= mass;
  for (Index i = 0; i < n; ++i) {
    if (p[i] <= kProbabilityFloor) p[i] = 0.0;
  }
  return {p, support_of(p, t / am1)};
}

MapResult rankmax_map(const Vector& s, Index true_class) {
  check_scores(s);
  check_class_index(true_class, s.size());
  const double sy = s[true_class];
  Vector u(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    u[i] = std::max((s[i] - sy) + 1.0, 0.0);
  }
  u[true_class] = 1.0;
  const double total = u.sum();
  Vector p = u / total;
  return {p, support_of(p, sy - 1.0)};
}

MapResult apply_mapping(const Vector& s, const MappingKind& kind) {
  switch (kind.family) {
    case MappingFamily::kSoftmax: {
      Vector p = softmax_map(s);
      return {p, support_of(p, -kInf)};
    }
    case MappingFamily::kSparsemax:
      return sparsemax_map(s);
    case MappingFamily::kEntmax:
      return entmax_map(s, kind.alpha);
    case MappingFamily::kRankmax:
      return rankmax_map(s, kind.true_class);
  }
  throw UsageError("unknown mapping family");
}

double boundary_distance(const Vector& s, const MappingKind& kind) {
  if (kind.family == MappingFamily::kSoftmax) return kInf;
  const MapResult r = apply_mapping(s, kind);
  double best = kInf;
  for (Index i = 0; i < s.size(); ++i) {
    if (kind.family == MappingFamily::kRankmax && i == kind.true_class) continue;
    best = std::min(best, std::abs(s[i] - r.support.threshold));
  }
  return best;
}

JacobianMatrix jacobian(const Vector& s, const MappingKind& kind) {
  const MapResult r = apply_mapping(s, kind);
  const Vector& p = r.probabilities;
  const Index n = s.size();
  JacobianMatrix out;
  out.mapping = kind;
  out.support = r.support;
  out.entries = Matrix::Zero(n, n);
  const auto& support = r.support.support;
  const Index m = r.support.size();

  switch (kind.family) {
    case MappingFamily::kSoftmax:
      out.entries = -p * p.transpose();
      out.entries.diagonal() += p;
      return out;
    case MappingFamily::kSparsemax: {
      const double inv_m = 1.0 / static_cast<double>(m);
      for (Index a : support) {
        for (Index b : support) out.entries(a, b) = (a == b ? 1.0 : 0.0) - inv_m;
      }
      break;
    }
    case MappingFamily::kEntmax: {
      Vector a = Vector::Zero(n);
      for (Index i : support) a[i] = std::pow(p[i], 2.0 - kind.alpha);
      const double sa = a.sum();
      for (Index i : support) {
        for (Index j : support) {
          out.entries(i, j) = (i == j ? a[i] : 0.0) - a[i] * a[j] / sa;
        }
      }
      break;
    }
    case MappingFamily::kRankmax: {
      // p = u / S with u_y = 1, hence S = 1 / p_y.
      const Index y = kind.true_class;
      const double inv_s = p[y];
      const double md = static_cast<double>(m);
      for (Index i : support) {
        for (Index j : support) {
          double v = (i == j ? 1.0 : 0.0) - p[i];
          if (j == y) v -= 1.0 - md * p[i];
          out.entries(i, j) = inv_s * v;
        }
      }
      break;
    }
  }
  out.near_boundary = boundary_distance(s, kind) < kBoundaryProximity;
  return out;
}

SpectralNorm spectral_norm(const Matrix& j, double tolerance,
                           int max_iterations) {
  if (!j.allFinite()) throw DomainError("matrix has non-finite entries");
  SpectralNorm result;

  // Restrict to rows/columns that are not identically zero.
  std::vector<Index> rows, cols;
  for (Index i = 0; i < j.rows(); ++i) {
    if (j.row(i).cwiseAbs().maxCoeff() > 0.0) rows.push_back(i);
  }
  for (Index i = 0; i < j.cols(); ++i) {
    if (j.col(i).cwiseAbs().maxCoeff() > 0.0) cols.push_back(i);
  }
  if (rows.empty() || cols.empty()) {
    result.converged = true;
    return result;
  }
  Matrix a(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      a(static_cast<Index>(r), static_cast<Index>(c)) = j(rows[r], cols[c]);
    }
  }

  const Index n = a.cols();
  Vector v = Vector::Ones(n).normalized();
  const double frob2 = a.squaredNorm();
  Vector w = a.transpose() * (a * v);
  if (w.norm() <= 1e-8 * frob2) {
    // All-ones is (numerically) in the kernel; perturb by index-seeded noise.
    for (Index i = 0; i < n; ++i) {
      Stream noise(0x5eedULL, static_cast<std::uint64_t>(cols[i]));
      v[i] = 1.0 + (noise.uniform() - 0.5);
    }
    v.normalize();
    w = a.transpose() * (a * v);
  }

  double lambda = v.dot(w);
  for (int it = 1; it <= max_iterations; ++it) {
    const double wn = w.norm();
    result.iterations = it;
    if (wn == 0.0) {
      lambda = 0.0;
      result.converged = true;
      break;
    }
    v = w / wn;
    w = a.transpose() * (a * v);
    const double next = v.dot(w);
    const double change = std::abs(std::sqrt(std::max(next, 0.0)) -
                                   std::sqrt(std::max(lambda, 0.0)));
    lambda = next;
    if (change <= tolerance * std::max(std::sqrt(std::max(next, 0.0)), 1e-300)) {
      result.converged = true;
      break;
    }
  }
  result.value = std::sqrt(std::max(lambda, 0.0));
  return result;
}

std::string to_string(OrderVerdict v) {
  switch (v) {
    case OrderVerdict::kSopConsistent:
      return "SOP-consistent";
    case OrderVerdict::kWopWitnessed:
      return "WOP-witnessed";
    case OrderVerdict::kInversionFound:
      return "inversion-found";
  }
  return "unknown";
}

OrderReport classify_order_preservation(const MappingKind& kind, Index trials,
                                        std::uint64_t seed, Index num_classes) {
  if (trials < 1) throw DomainError("trials must be >= 1");
  if (kind.family == MappingFamily::kRankmax) {
    check_class_index(kind.true_class, num_classes);
  }
  static constexpr double kScales[] = {0.1, 1.0, 10.0};
  OrderReport report;
  report.mapping = kind;
  report.trials = trials;

  Vector s(num_classes);
  for (Index t = 0; t < trials; ++t) {
    Stream rng(seed, static_cast<std::uint64_t>(t));
    const double scale = kScales[t % 3];
    for (Index i = 0; i < num_classes; ++i) s[i] = scale * rng.normal();
    const Vector p = apply_mapping(s, kind).probabilities;

    bool tie = false;
    bool inversion = false;
    for (Index i = 0; i < num_classes; ++i) {
      for (Index j = 0; j < num_classes; ++j) {
        if (!(s[i] > s[j])) continue;
        if (p[i] < p[j] && !inversion) {
          inversion = true;
          if (!report.inversion_witness) {
            report.inversion_witness = OrderWitness{s, p, i, j};
          }
        }
        if (s[i] > s[j] + 1e-6 && probabilities_tied(p[i], p[j]) && !tie) {
          tie = true;
          if (!report.tie_witness) report.tie_witness = OrderWitness{s, p, i, j};
        }
      }
    }
    report.tie_witness_count += tie ? 1 : 0;
    report.inversion_count += inversion ? 1 : 0;
  }
  if (report.inversion_count > 0) {
    report.verdict = OrderVerdict::kInversionFound;
  } else if (report.tie_witness_count > 0) {
    report.verdict = OrderVerdict::kWopWitnessed;
  }
  return report;
}

}  // namespace fybench
