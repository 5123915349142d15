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

#include "fybench/convergence.h"

#include <algorithm>
#include <cmath>
#include <optional>

#include "fybench/approx.h"
#include "fybench/fy_losses.h"
#include "fybench/huffman.h"
#include "fybench/random.h"

namespace fybench {

double head_smoothness_bound(LossKind loss, Index num_classes) {
  switch (loss) {
    case LossKind::kSoftmax:
    case LossKind::kSsmSimple:
    case LossKind::kSsm:
    case LossKind::kHsm:
      return 0.5;
    case LossKind::kNce:
      return 0.25;
    case LossKind::kSparsemax:
    case LossKind::kEntmax:
      return 1.0;
    case LossKind::kRankmax:
      return static_cast<double>(num_classes);
    case LossKind::kRg:
      return 1.0 / static_cast<double>(num_classes);
  }
  return 1.0;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2 || x.size() != y.size()) {
    throw DomainError("slope fit needs at least two paired points");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

namespace {

// Gradient of the mean head loss with respect to the rows of W.
class HeadProblem {
 public:
  HeadProblem(LossKind loss, const Matrix& x, const std::vector<Index>& labels,
              Index num_classes, double gamma, const ConvergenceOptions& opts)
      : loss_(loss), x_(x), labels_(labels), c_(num_classes), gamma_(gamma),
        alpha_(opts.alpha), q_(ProposalDist::Uniform(num_classes)) {
    if (loss == LossKind::kHsm) tree_ = build_balanced(num_classes);
    if (is_sampled(loss)) {
      for (std::size_t i = 0; i < labels.size(); ++i) {
        draws_.push_back(draw_negatives(q_, opts.k, opts.seed, i));
      }
    }
  }

  Index rows() const { return loss_ == LossKind::kHsm ? c_ - 1 : c_; }

  Matrix gradient(const Matrix& w) const {
    const Matrix scores = x_ * w.transpose();  // n x rows
    Matrix gs(scores.rows(), scores.cols());
    for (Index i = 0; i < scores.rows(); ++i) {
      const Vector s = scores.row(i).transpose();
      gs.row(i) = score_gradient(s, i).transpose();
    }
    return gs.transpose() * x_ / static_cast<double>(x_.rows()) + gamma_ * w;
  }

 private:
  Vector score_gradient(const Vector& s, Index i) const {
    const Index y = labels_[i];
    switch (loss_) {
      case LossKind::kSoftmax: {
        Vector g = softmax_map(s);
        g[y] -= 1.0;
        return g;
      }
      case LossKind::kSparsemax:
        return fy_loss(s, LabelVector::one_hot(c_, y),
                       RegularizerKind::HalfSquaredL2()).gradient;
      case LossKind::kEntmax:
        return fy_loss(s, LabelVector::one_hot(c_, y),
                       RegularizerKind::TsallisNeg(alpha_)).gradient;
      case LossKind::kRankmax:
        return rankmax_grad(s, y);
      case LossKind::kSsmSimple:
        return ssm_simple_loss(s, y, draws_[i]).gradient;
      case LossKind::kSsm:
        return ssm_corrected_loss(s, y, draws_[i], q_).gradient;
      case LossKind::kNce:
        return nce_loss(s, y, draws_[i], q_).gradient;
      case LossKind::kHsm:
        return hsm_loss(s, y, *tree_).gradient;
      case LossKind::kRg:
        return rg_loss(s, LabelVector::one_hot(c_, y)).gradient;
    }
    throw UsageError("unknown loss");
  }

  LossKind loss_;
  const Matrix& x_;
  const std::vector<Index>& labels_;
  Index c_;
  double gamma_;
  double alpha_;
  ProposalDist q_;
  std::optional<HuffmanTree> tree_;
  std::vector<SampleDraw> draws_;
};

}  // namespace

ConvergenceEstimate estimate_convergence_factor(LossKind loss,
                                                const Matrix& features,
                                                const std::vector<Index>& labels,
                                                Index num_classes, double gamma,
                                                const ConvergenceOptions& opts) {
  if (!(gamma > 0.0)) throw ConfigError("the head problem needs gamma > 0");
  if (features.rows() != static_cast<Index>(labels.size()) || labels.empty()) {
    throw UsageError("features and labels differ in length");
  }
  for (Index y : labels) check_class_index(y, num_classes);

  ConvergenceEstimate est;
  est.L_head_bound = head_smoothness_bound(loss, num_classes);
  est.L_G = features.rowwise().squaredNorm().maxCoeff();
  est.kappa_bound = 1.0 + est.L_head_bound * est.L_G / gamma;
  est.rho_bound = (est.kappa_bound - 1.0) / (est.kappa_bound + 1.0);
  est.eta = opts.eta > 0.0 ? opts.eta
                           : 2.0 / (est.L_head_bound * est.L_G + 2.0 * gamma);

  const HeadProblem problem(loss, features, labels, num_classes, gamma, opts);
  const Matrix w0 = Matrix::Zero(problem.rows(), features.cols());

  // Reference optimum.
  Matrix w = w0;
  bool converged = false;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Matrix g = problem.gradient(w);
    if (g.norm() < 1e-14) {
      converged = true;
      break;
    }
    w -= est.eta * g;
  }
  const Matrix w_star = w;

  // Trajectory.
  std::vector<double> t_axis;
  std::vector<double> log_dist;
  w = w0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const double dist = (w - w_star).norm();
    if (!(dist > opts.distance_floor)) break;
    t_axis.push_back(static_cast<double>(it));
    log_dist.push_back(std::log(dist));
    w -= est.eta * problem.gradient(w);
  }
  est.iterations = static_cast<int>(t_axis.size());
  const std::size_t first = t_axis.size() / 2;
  std::vector<double> tx(t_axis.begin() + static_cast<long>(first), t_axis.end());
  std::vector<double> ty(log_dist.begin() + static_cast<long>(first), log_dist.end());
  est.fit_points = static_cast<int>(tx.size());
  if (tx.size() >= 2) {
    est.rho_hat = std::exp(fit_slope(tx, ty));
  }
  est.flagged = !converged || tx.size() < 10;
  return est;
}

ComplexityProfile complexity_profile(LossKind loss,
                                     const std::vector<Index>& class_counts,
                                     const ComplexityOptions& opts) {
  ComplexityProfile prof;
  prof.loss = loss;
  std::vector<InteractionSet> datasets;
  for (Index c : class_counts) {
    InteractionSet data;
    data.n_items = c;
    data.n_users = 64;
    Stream rng(opts.seed, static_cast<std::uint64_t>(c));
    for (Index i = 0; i < opts.n_examples; ++i) {
      data.rows.push_back({static_cast<std::uint32_t>(i % data.n_users),
                           static_cast<std::uint32_t>(rng.below(static_cast<std::uint64_t>(c))),
                           1.0, Split::kTrain});
    }
    datasets.push_back(std::move(data));
    ComplexityPoint pt;
    pt.num_classes = c;
    prof.points.push_back(pt);
  }
  TrainConfig cfg;
  cfg.loss = loss;
  cfg.l2 = 0.0;
  cfg.epochs = 1;
  cfg.k = opts.k;
  cfg.tree = opts.tree;
  cfg.evaluate = false;
  cfg.learning_rate = 0.01;
  cfg.seed = opts.seed;
  // Repeats sweep every C in turn so machine noise spreads across the fit.
  std::vector<std::vector<double>> times(class_counts.size());
  for (int r = 0; r < opts.repeats; ++r) {
    for (std::size_t i = 0; i < class_counts.size(); ++i) {
      const Index c = class_counts[i];
      MFModel model = init_model(datasets[i].n_users, c, opts.dim, 0.1, opts.seed + r,
                                 loss == LossKind::kHsm);
      const TrainResult res = train(std::move(model), datasets[i], cfg);
      times[i].push_back(res.records.front().wall_time_s);
      prof.points[i].score_evals = res.records.front().score_evals;
    }
  }
  std::vector<double> log_c;
  std::vector<double> log_t;
  std::vector<double> log_e;
  for (std::size_t i = 0; i < class_counts.size(); ++i) {
    std::sort(times[i].begin(), times[i].end());
    prof.points[i].median_time_s = times[i][times[i].size() / 2];
    log_c.push_back(std::log(static_cast<double>(class_counts[i])));
    log_t.push_back(std::log(prof.points[i].median_time_s));
    log_e.push_back(std::log(static_cast<double>(prof.points[i].score_evals)));
  }
  if (prof.points.size() >= 2) {
    prof.time_slope = fit_slope(log_c, log_t);
    prof.evals_slope = fit_slope(log_c, log_e);
  }
  return prof;
}

}  // namespace fybench
