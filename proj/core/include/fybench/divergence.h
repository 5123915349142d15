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

#ifndef FYBENCH_DIVERGENCE_H_
#define FYBENCH_DIVERGENCE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "fybench/common.h"
#include "fybench/huffman.h"
#include "fybench/proposal.h"

namespace fybench {

// sum_j (P_j - Q_j)^2 / Q_j. Throws DomainError if Q_j = 0 < P_j.
double chi2(const Vector& p, const Vector& q);

// KL(P || Q) with 0 log 0 = 0. Returns +inf (and sets *violated when given)
// if P_j > 0 = Q_j.
double kl(const Vector& p, const Vector& q, bool* violated = nullptr);

// tau KL(P || M) + (1 - tau) KL(Q || M), M = tau P + (1 - tau) Q.
double js_tau(const Vector& p, const Vector& q, double tau);

enum class Scheme { kSsmSimple, kSsm, kNce, kHsm, kRg };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);

struct DeltaReport {
  Scheme scheme = Scheme::kSsm;
  double bias_asymptotic = 0.0;
  double bias_curvature = 0.0;
  double variance = 0.0;
  Index k = 0;
  std::map<std::string, double> aux;
};

// Inputs beyond (s, y) that some schemes need.
struct SchemeInputs {
  const ProposalDist* proposal = nullptr;  // SSM-Simple, SSM, NCE
  Index k = 0;                             // SSM-Simple, SSM, NCE
  const HuffmanTree* tree = nullptr;       // HSM
  const Vector* node_logits = nullptr;     // HSM
};

// Closed-form bias and variance cells for one scheme. Missing inputs raise
// UsageError.
DeltaReport delta_report(Scheme scheme, const Vector& s, Index y,
                         const SchemeInputs& in);

struct EmpiricalReport {
  double mean_conjugate = 0.0;
  double bias_hat = 0.0;
  double variance_hat = 0.0;
  Index trials = 0;
  double std_error = 0.0;
};

inline constexpr int kEmpiricalPartitions = 8;

// Monte-Carlo mean and (n - 1) variance of the scheme's conjugate term
// against log-sum-exp. Trials are split into kEmpiricalPartitions seeded
// streams and merged in a fixed order.
//   SSM-Simple: log(e^{s_y} + sum_i e^{s_{y'_i}})
//   SSM:        log((1/k) sum_i e^{s_{y'_i}} / q(y'_i))
//   NCE:        KL(P || M_k) + sum_i psi(y'_i) on normalized logits
//               (reference 0); psi(j) = log(Q(j) / M_k(j))
//   HSM:        E_{y ~ P_s}[-log P_HSM(y) + s_y], enumerated over labels
//   RG:         Z_RG(s)
EmpiricalReport empirical_report(Scheme scheme, const Vector& s, Index y,
                                 const SchemeInputs& in, Index trials,
                                 std::uint64_t seed);

}  // namespace fybench

#endif  // FYBENCH_DIVERGENCE_H_
