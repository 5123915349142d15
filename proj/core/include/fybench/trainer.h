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

#ifndef FYBENCH_TRAINER_H_
#define FYBENCH_TRAINER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fybench/common.h"
#include "fybench/datasets.h"
#include "fybench/huffman.h"
#include "fybench/metrics.h"
#include "fybench/proposal.h"

namespace fybench {

enum class LossKind {
  kSoftmax,
  kSparsemax,
  kEntmax,
  kRankmax,
  kSsmSimple,
  kSsm,
  kNce,
  kHsm,
  kRg,
};

std::string to_string(LossKind loss);
LossKind parse_loss(const std::string& name);
bool is_sampled(LossKind loss);

// Two-tower matrix factorization: s = V u for user factor u.
struct MFModel {
  FactorMatrix user_factors;  // n_users x d
  FactorMatrix item_factors;  // n_items x d
  FactorMatrix node_factors;  // (n_items - 1) x d, HSM only; otherwise empty

  Index dim() const { return user_factors.cols(); }
};

// N(0, scale^2) entries from the seed. Node factors start at zero.
MFModel init_model(Index n_users, Index n_items, Index dim, double scale,
                   std::uint64_t seed, bool with_nodes);

enum class Optimizer { kSgd, kAdagrad, kAdam };
std::string to_string(Optimizer opt);
Optimizer parse_optimizer(const std::string& name);

enum class TreeKind { kHuffman, kBalanced };

struct TrainConfig {
  LossKind loss = LossKind::kSoftmax;
  double alpha = 1.5;  // entmax
  double learning_rate = 0.05;
  double l2 = 1e-4;    // gamma; 0 disables the dense L2 step
  int epochs = 10;
  Index batch_size = 256;
  Index k = 10;        // negatives for sampled losses
  ProposalKind proposal = ProposalKind::kUniform;
  Index dns_pool = 500;
  Index dns_top = 100;
  // DNS candidates that are training positives of the user rank last.
  bool dns_exclude_positives = true;
  TreeKind tree = TreeKind::kHuffman;
  Optimizer optimizer = Optimizer::kSgd;
  std::uint64_t seed = 1;
  std::vector<Index> cutoffs = {20};
  bool evaluate = true;
  Split eval_split = Split::kValid;
};

// Throws ConfigError for invalid settings.
void validate(const TrainConfig& cfg);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;   // mean per-example loss during the epoch
  double wall_time_s = 0.0;  // training part only, evaluation excluded
  Index score_evals = 0;     // per-class score computations
  std::optional<MetricsReport> metrics;
  bool diverged = false;
};

struct TrainResult {
  MFModel model;
  std::vector<EpochRecord> records;
  std::optional<HuffmanTree> tree;  // HSM only
  bool diverged = false;
  std::string diagnostic;
};

// Loss above which training is treated as diverged.
inline constexpr double kDivergenceThreshold = 1e10;

// Minibatch gradient descent over the training (user, item) pairs of `data`.
// The objective is sum_n loss_n + (gamma / 2)(|U|^2 + |V|^2 [+ |W|^2]); each
// minibatch step uses the summed example gradients plus (|B| / N) gamma theta.
TrainResult train(MFModel model, const InteractionSet& data,
                  const TrainConfig& cfg);

// Per-class scores for one user (HSM: log P_HSM).
Vector user_scores(const MFModel& model, Index user,
                   const HuffmanTree* tree = nullptr);

// Metrics averaged over users with at least one item in `split`. Training
// items (and validation items when split is test) are excluded from ranking.
MetricsReport evaluate_model(const MFModel& model, const InteractionSet& data,
                             Split split, const std::vector<Index>& cutoffs,
                             const HuffmanTree* tree = nullptr);

// Alternating exact minimization of the RG surrogate objective
//   sum_{(u, y)} (Z_RG(V u) - v_y . u) + (gamma / 2)(|U|^2 + |V|^2).
// One record per sweep; half_sweep_objectives holds the objective after every
// user and item half-step. ALS never forms score vectors; score_evals counts
// one cross-term accumulation per training pair.
struct AlsResult {
  MFModel model;
  std::vector<EpochRecord> records;
  std::vector<double> half_sweep_objectives;
};
AlsResult train_rg_als(MFModel model, const InteractionSet& data,
                       const TrainConfig& cfg);
double rg_objective(const MFModel& model, const InteractionSet& data,
                    double gamma);

}  // namespace fybench

#endif  // FYBENCH_TRAINER_H_
