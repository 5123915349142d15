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

#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/Cholesky>

#include "fybench/trainer.h"

namespace fybench {

namespace {

std::vector<std::vector<Index>> train_items(const InteractionSet& data) {
  return data.items_by_user(Split::kTrain);
}

}  // namespace

double rg_objective(const MFModel& model, const InteractionSet& data,
                    double gamma) {
  const FactorMatrix& U = model.user_factors;
  const FactorMatrix& V = model.item_factors;
  const double c = static_cast<double>(V.rows());
  const Vector v_sum = V.colwise().sum().transpose();
  const Matrix gram = V.transpose() * V;
  const Matrix vmv = gram / c - v_sum * v_sum.transpose() / (c * c);
  const auto items = train_items(data);
  double total = 0.0;
  for (Index u = 0; u < data.n_users; ++u) {
    if (items[u].empty()) continue;
    const Vector x = U.row(u).transpose();
    const double n = static_cast<double>(items[u].size());
    Vector r = Vector::Zero(V.cols());
    for (Index j : items[u]) r += V.row(j).transpose();
    total += n * (std::log(c) + v_sum.dot(x) / c + 0.5 * x.dot(vmv * x)) - r.dot(x);
  }
  return total + 0.5 * gamma * (U.squaredNorm() + V.squaredNorm());
}

AlsResult train_rg_als(MFModel model, const InteractionSet& data,
                       const TrainConfig& cfg) {
  validate(cfg);
  if (cfg.loss != LossKind::kRg) throw ConfigError("ALS requires the rg loss");
  if (!(cfg.l2 > 0.0)) throw ConfigError("ALS requires l2 > 0");
  const double gamma = cfg.l2;
  const Index d = model.dim();
  const Index n_items = data.n_items;
  const double c = static_cast<double>(n_items);
  const auto items = train_items(data);
  std::vector<std::vector<Index>> users_of(static_cast<std::size_t>(n_items));
  Index n_examples = 0;
  for (Index u = 0; u < data.n_users; ++u) {
    for (Index j : items[u]) users_of[j].push_back(u);
    n_examples += static_cast<Index>(items[u].size());
  }
  if (n_examples == 0) throw DomainError("no training interactions");
  const Matrix eye = Matrix::Identity(d, d);

  AlsResult result;
  FactorMatrix& U = model.user_factors;
  FactorMatrix& V = model.item_factors;
  for (int sweep = 1; sweep <= cfg.epochs; ++sweep) {
    const auto start = std::chrono::steady_clock::now();

    // Users: (n_u V^T M V + gamma I) u = r_u - (n_u / C) V^T 1.
    {
      const Vector v_sum = V.colwise().sum().transpose();
      const Matrix vmv =
          (V.transpose() * V) / c - v_sum * v_sum.transpose() / (c * c);
      for (Index u = 0; u < data.n_users; ++u) {
        const double n = static_cast<double>(items[u].size());
        Vector rhs = -n / c * v_sum;
        for (Index j : items[u]) rhs += V.row(j).transpose();
        const Matrix lhs = n * vmv + gamma * eye;
        U.row(u) = lhs.ldlt().solve(rhs).transpose();
      }
    }
    result.half_sweep_objectives.push_back(rg_objective(model, data, gamma));

    // Items: with A = sum_u n_u u u^T, w = sum_u n_u u, b_j = r_j - w / C,
    // the column sum is vbar = sum_j b_j / gamma and
    // V_j = ((1/C) A + gamma I)^{-1} (b_j + A vbar / C^2).
    {
      Matrix a = Matrix::Zero(d, d);
      Vector w = Vector::Zero(d);
      for (Index u = 0; u < data.n_users; ++u) {
        const double n = static_cast<double>(items[u].size());
        if (n == 0.0) continue;
        const Vector x = U.row(u).transpose();
        a.noalias() += n * x * x.transpose();
        w += n * x;
      }
      Matrix b(n_items, d);
      for (Index j = 0; j < n_items; ++j) {
        Vector r = -w / c;
        for (Index u : users_of[j]) r += U.row(u).transpose();
        b.row(j) = r.transpose();
      }
      const Vector v_bar = b.colwise().sum().transpose() / gamma;
      const Vector shift = a * v_bar / (c * c);
      const Eigen::LDLT<Matrix> solver(a / c + gamma * eye);
      for (Index j = 0; j < n_items; ++j) {
        V.row(j) = solver.solve(b.row(j).transpose() + shift).transpose();
      }
    }
    const double objective = rg_objective(model, data, gamma);
    result.half_sweep_objectives.push_back(objective);

    EpochRecord rec;
    rec.epoch = sweep;
    rec.train_loss = objective / static_cast<double>(n_examples);
    rec.wall_time_s = std::max(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(),
        1e-9);
    rec.score_evals = n_examples;
    if (cfg.evaluate) {
      rec.metrics = evaluate_model(model, data, cfg.eval_split, cfg.cutoffs);
    }
    result.records.push_back(rec);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace fybench
