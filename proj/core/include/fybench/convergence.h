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

#ifndef FYBENCH_CONVERGENCE_H_
#define FYBENCH_CONVERGENCE_H_

#include <cstdint>
#include <vector>

#include "fybench/common.h"
#include "fybench/trainer.h"

namespace fybench {

// Bound on ||d grad / d s||_2 used in the analytic condition number:
// 1/2 softmax, SSM and HSM; 1/4 NCE; 1 sparsemax and entmax; C rankmax;
// 1/C for the RG quadratic.
double head_smoothness_bound(LossKind loss, Index num_classes);

struct ConvergenceOptions {
  double eta = 0.0;  // 0 selects 2 / (L_H L_G + 2 gamma)
  int max_iterations = 20000;
  double distance_floor = 1e-10;
  double alpha = 1.5;  // entmax
  Index k = 10;        // sampled losses
  std::uint64_t seed = 1;  // frozen negative draws for sampled losses
};

struct ConvergenceEstimate {
  double rho_hat = 0.0;
  double kappa_bound = 0.0;   // 1 + L_H L_G / gamma
  double rho_bound = 0.0;     // (kappa - 1) / (kappa + 1)
  double L_head_bound = 0.0;
  double L_G = 0.0;           // max_i ||x_i||^2
  double eta = 0.0;
  int iterations = 0;         // length of the recorded trajectory
  int fit_points = 0;
  bool flagged = false;       // reference run did not converge or fit was poor
};

// Gradient descent on the strongly convex last-layer problem
//   (1/n) sum_i loss(W x_i, y_i) + (gamma / 2) ||W||_F^2,  W in R^{C x d}
// (HSM: one row per internal node of a balanced tree). A long first run gives
// W*; a second run records ||W_t - W*|| and rho_hat is the least-squares
// slope of log distance over the final half of the iterations above the floor.
ConvergenceEstimate estimate_convergence_factor(LossKind loss,
                                                const Matrix& features,
                                                const std::vector<Index>& labels,
                                                Index num_classes, double gamma,
                                                const ConvergenceOptions& opts = {});

struct ComplexityPoint {
  Index num_classes = 0;
  double median_time_s = 0.0;
  Index score_evals = 0;
};

struct ComplexityProfile {
  LossKind loss = LossKind::kSoftmax;
  std::vector<ComplexityPoint> points;
  double time_slope = 0.0;   // least squares of log time on log C
  double evals_slope = 0.0;  // same for score_evals
};

struct ComplexityOptions {
  Index n_examples = 2000;
  Index k = 10;
  Index dim = 16;
  int repeats = 3;
  std::uint64_t seed = 7;
  TreeKind tree = TreeKind::kBalanced;
};

// One training epoch (gamma = 0, no evaluation) per C value and repeat on
// random interactions; time is the median over repeats.
ComplexityProfile complexity_profile(LossKind loss,
                                     const std::vector<Index>& class_counts,
                                     const ComplexityOptions& opts = {});

// Least-squares slope of y on x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fybench

#endif  // FYBENCH_CONVERGENCE_H_
