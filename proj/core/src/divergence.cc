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

#include "fybench/divergence.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "fybench/approx.h"
#include "fybench/random.h"
#include "fybench/simplex_maps.h"

namespace fybench {

namespace {

void check_pair(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) throw UsageError("distributions differ in length");
}

}  // namespace

double chi2(const Vector& p, const Vector& q) {
  check_pair(p, q);
  double total = 0.0;
  for (Index j = 0; j < p.size(); ++j) {
    if (q[j] <= 0.0) {
      if (p[j] > 0.0) throw DomainError("chi2: P not dominated by Q");
      continue;
    }
    const double d = p[j] - q[j];
    total += d * d / q[j];
  }
  return total;
}

double kl(const Vector& p, const Vector& q, bool* violated) {
  check_pair(p, q);
  if (violated != nullptr) *violated = false;
  double total = 0.0;
  for (Index j = 0; j < p.size(); ++j) {
    if (p[j] <= 0.0) continue;
    if (q[j] <= 0.0) {
      if (violated != nullptr) *violated = true;
      return kInf;
    }
    total += p[j] * std::log(p[j] / q[j]);
  }
  return total;
}

double js_tau(const Vector& p, const Vector& q, double tau) {
  check_pair(p, q);
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("tau must lie in [0, 1]");
  const Vector m = tau * p + (1.0 - tau) * q;
  return tau * kl(p, m) + (1.0 - tau) * kl(q, m);
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kSsmSimple:
      return "ssm_simple";
    case Scheme::kSsm:
      return "ssm";
    case Scheme::kNce:
      return "nce";
    case Scheme::kHsm:
      return "hsm";
    case Scheme::kRg:
      return "rg";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "ssm_simple") return Scheme::kSsmSimple;
  if (name == "ssm") return Scheme::kSsm;
  if (name == "nce") return Scheme::kNce;
  if (name == "hsm") return Scheme::kHsm;
  if (name == "rg") return Scheme::kRg;
  throw UsageError("unknown scheme: " + name);
}

namespace {

void require_sampling(const Vector& s, const SchemeInputs& in) {
  if (in.proposal == nullptr) throw UsageError("scheme needs a proposal");
  if (in.k < 1) throw UsageError("scheme needs k >= 1");
  if (in.proposal->num_classes() != s.size()) {
    throw UsageError("proposal size mismatch");
  }
}

void require_tree(const SchemeInputs& in) {
  if (in.tree == nullptr || in.node_logits == nullptr) {
    throw UsageError("HSM needs a tree and node logits");
  }
}

// log P_s(y) - log P_HSM(y)
double hsm_pointwise_gap(const Vector& s, Index y, const SchemeInputs& in) {
  if (in.tree->num_classes() != s.size()) throw UsageError("tree size mismatch");
  double log_hsm = 0.0;
  for (const PathStep& step : in.tree->path(y)) {
    log_hsm -= softplus(-step.sign * (*in.node_logits)[step.node]);
  }
  return (s[y] - log_sum_exp(s)) - log_hsm;
}

}  // namespace

DeltaReport delta_report(Scheme scheme, const Vector& s, Index y,
                         const SchemeInputs& in) {
  check_scores(s);
  check_class_index(y, s.size());
  DeltaReport r;
  r.scheme = scheme;
  r.k = in.k;
  const double lse = log_sum_exp(s);
  switch (scheme) {
    case Scheme::kSsmSimple: {
      require_sampling(s, in);
      const Vector& q = in.proposal->probabilities();
      // Everything below is invariant to a common shift of s.
      const double top = s.maxCoeff();
      const Vector e = (s.array() - top).exp().matrix();
      const double mu = q.dot(e);
      const double var_e = q.dot(e.cwiseProduct(e)) - mu * mu;
      const double kd = static_cast<double>(in.k);
      const double omega_hat = e[y] + kd * mu;
      r.bias_asymptotic = std::log(omega_hat) - (lse - top);
      r.bias_curvature = -kd * var_e / (2.0 * omega_hat * omega_hat);
      r.variance = kd * var_e / (omega_hat * omega_hat);
      r.aux["mu_x"] = mu;
      r.aux["sigma2_x"] = var_e / kd;
      r.aux["omega_hat"] = omega_hat;
      r.aux["shift"] = top;
      break;
    }
    case Scheme::kSsm: {
      require_sampling(s, in);
      const Vector p = softmax_map(s);
      const double c2 = chi2(p, in.proposal->probabilities());
      const double kd = static_cast<double>(in.k);
      r.bias_asymptotic = 0.0;
      r.variance = c2 / kd;
      r.bias_curvature = -0.5 * r.variance;
      r.aux["chi2"] = c2;
      r.aux["log_mu_x"] = lse;
      r.aux["sigma2_x_relative"] = c2 / kd;
      break;
    }
    case Scheme::kNce: {
      require_sampling(s, in);
      const Vector p = softmax_map(s);
      const Vector& q = in.proposal->probabilities();
      const double kd = static_cast<double>(in.k);
      const double tau = 1.0 / (1.0 + kd);
      const double c2 = chi2(p, q);
      const double js = js_tau(p, q, tau);
      double mu_psi = 0.0;
      double m2_psi = 0.0;
      for (Index j = 0; j < s.size(); ++j) {
        const double psi = -std::log(kd + p[j] / q[j]);
        mu_psi += q[j] * psi;
        m2_psi += q[j] * psi * psi;
      }
      r.bias_asymptotic = (1.0 + kd) * js;
      r.bias_curvature = 0.0;
      r.variance = kd / ((1.0 + kd) * (1.0 + kd)) * c2;
      r.aux["chi2"] = c2;
      r.aux["js_tau"] = js;
      r.aux["tau"] = tau;
      r.aux["mu_x"] = mu_psi;
      r.aux["sigma2_x"] = (m2_psi - mu_psi * mu_psi) / kd;
      break;
    }
    case Scheme::kHsm: {
      require_tree(in);
      if (in.tree->num_classes() != s.size()) {
        throw UsageError("tree size mismatch");
      }
      const Vector p = softmax_map(s);
      const Vector p_hsm = hsm_probabilities(*in.node_logits, *in.tree);
      const double divergence = kl(p, p_hsm);
      r.bias_asymptotic = divergence;
      r.aux["kl"] = divergence;
      r.aux["pointwise_gap"] = hsm_pointwise_gap(s, y, in);
      break;
    }
    case Scheme::kRg:
      r.bias_asymptotic = rg_partition(s) - lse;
      break;
  }
  return r;
}

namespace {

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double total = n + o.n;
    const double delta = o.mean - mean;
    mean += delta * (o.n / total);
    m2 += o.m2 + delta * delta * (n * o.n / total);
    n = total;
  }
};

}  // namespace

EmpiricalReport empirical_report(Scheme scheme, const Vector& s, Index y,
                                 const SchemeInputs& in, Index trials,
                                 std::uint64_t seed) {
  check_scores(s);
  check_class_index(y, s.size());
  if (trials < 100) throw DomainError("need at least 100 trials");
  const double lse = log_sum_exp(s);

  // Deterministic schemes: a single value repeated.
  std::optional<double> fixed;
  Vector p;
  Vector log_q;
  double nce_positive = 0.0;
  const double kd = static_cast<double>(in.k);
  switch (scheme) {
    case Scheme::kHsm:
      // Exact expectation of the per-label gap over y ~ P_s.
      require_tree(in);
      if (in.tree->num_classes() != s.size()) throw UsageError("tree size mismatch");
      fixed = kl(softmax_map(s), hsm_probabilities(*in.node_logits, *in.tree));
      break;
    case Scheme::kRg:
      fixed = rg_partition(s) - lse;
      break;
    case Scheme::kNce: {
      require_sampling(s, in);
      // The positive term carries no randomness; take its expectation over
      // y+ ~ P_s so the mean targets KL(P || M) + k KL(Q || M).
      p = softmax_map(s);
      const Vector& q = in.proposal->probabilities();
      nce_positive = kl(p, (p + kd * q) / (1.0 + kd));
      break;
    }
    case Scheme::kSsmSimple:
    case Scheme::kSsm:
      require_sampling(s, in);
      log_q = in.proposal->probabilities().array().log().matrix();
      break;
  }

  std::vector<double> logits(static_cast<std::size_t>(in.k + 1));
  auto sample_once = [&](Stream& rng) -> double {
    switch (scheme) {
      case Scheme::kSsmSimple: {
        logits[0] = s[y];
        for (Index i = 1; i <= in.k; ++i) logits[i] = s[in.proposal->sample(rng)];
        double top = logits[0];
        for (double v : logits) top = std::max(top, v);
        double total = 0.0;
        for (double v : logits) total += std::exp(v - top);
        return top + std::log(total) - lse;
      }
      case Scheme::kSsm: {
        double top = -kInf;
        for (Index i = 0; i < in.k; ++i) {
          const Index j = in.proposal->sample(rng);
          logits[i] = s[j] - log_q[j];
          top = std::max(top, logits[i]);
        }
        double total = 0.0;
        for (Index i = 0; i < in.k; ++i) total += std::exp(logits[i] - top);
        return top + std::log(total / kd) - lse;
      }
      case Scheme::kNce: {
        double total = nce_positive;
        for (Index i = 0; i < in.k; ++i) {
          const Index j = in.proposal->sample(rng);
          total += std::log1p(kd) - std::log(kd + p[j] / in.proposal->q(j));
        }
        return total;
      }
      default:
        return *fixed;
    }
  };

  std::vector<Moments> parts(kEmpiricalPartitions);
  for (int part = 0; part < kEmpiricalPartitions; ++part) {
    const Index count = trials / kEmpiricalPartitions +
                        (part < trials % kEmpiricalPartitions ? 1 : 0);
    Stream rng(seed, static_cast<std::uint64_t>(part));
    for (Index t = 0; t < count; ++t) parts[part].add(sample_once(rng));
  }
  Moments all;
  for (const Moments& m : parts) all.merge(m);

  EmpiricalReport r;
  r.trials = trials;
  r.bias_hat = all.mean;
  r.mean_conjugate = scheme == Scheme::kNce ? all.mean : all.mean + lse;
  r.variance_hat = all.m2 / (all.n - 1.0);
  r.std_error = std::sqrt(r.variance_hat / all.n);
  return r;
}

}  // namespace fybench
