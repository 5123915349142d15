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

#include "fybench/trainer.h"

#include <chrono>
#include <cmath>
#include <numeric>

#include "fybench/approx.h"
#include "fybench/fy_losses.h"
#include "fybench/parallel.h"
#include "fybench/random.h"
#include "fybench/simplex_maps.h"

namespace fybench {

std::string to_string(LossKind loss) {
  switch (loss) {
    case LossKind::kSoftmax:
      return "softmax";
    case LossKind::kSparsemax:
      return "sparsemax";
    case LossKind::kEntmax:
      return "entmax";
    case LossKind::kRankmax:
      return "rankmax";
    case LossKind::kSsmSimple:
      return "ssm_simple";
    case LossKind::kSsm:
      return "ssm";
    case LossKind::kNce:
      return "nce";
    case LossKind::kHsm:
      return "hsm";
    case LossKind::kRg:
      return "rg";
  }
  return "unknown";
}

LossKind parse_loss(const std::string& name) {
  for (LossKind k : {LossKind::kSoftmax, LossKind::kSparsemax, LossKind::kEntmax,
                     LossKind::kRankmax, LossKind::kSsmSimple, LossKind::kSsm,
                     LossKind::kNce, LossKind::kHsm, LossKind::kRg}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown loss: " + name);
}

bool is_sampled(LossKind loss) {
  return loss == LossKind::kSsmSimple || loss == LossKind::kSsm ||
         loss == LossKind::kNce;
}

std::string to_string(Optimizer opt) {
  switch (opt) {
    case Optimizer::kSgd:
      return "sgd";
    case Optimizer::kAdagrad:
      return "adagrad";
    case Optimizer::kAdam:
      return "adam";
  }
  return "unknown";
}

Optimizer parse_optimizer(const std::string& name) {
  if (name == "sgd") return Optimizer::kSgd;
  if (name == "adagrad") return Optimizer::kAdagrad;
  if (name == "adam") return Optimizer::kAdam;
  throw ConfigError("unknown optimizer: " + name);
}

MFModel init_model(Index n_users, Index n_items, Index dim, double scale,
                   std::uint64_t seed, bool with_nodes) {
  if (n_users < 1 || n_items < 2 || dim < 1) {
    throw ConfigError("model needs n_users >= 1, n_items >= 2, d >= 1");
  }
  MFModel m;
  Stream rng(seed, 0x6d6f64656cULL);
  m.user_factors.resize(n_users, dim);
  m.item_factors.resize(n_items, dim);
  for (Index i = 0; i < n_users; ++i) {
    for (Index f = 0; f < dim; ++f) m.user_factors(i, f) = scale * rng.normal();
  }
  for (Index i = 0; i < n_items; ++i) {
    for (Index f = 0; f < dim; ++f) m.item_factors(i, f) = scale * rng.normal();
  }
  if (with_nodes) m.node_factors = FactorMatrix::Zero(n_items - 1, dim);
  return m;
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (!(cfg.l2 >= 0.0) || !std::isfinite(cfg.l2)) {
    throw ConfigError("l2 must be nonnegative");
  }
  if (cfg.epochs < 1) throw ConfigError("epochs must be at least 1");
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (is_sampled(cfg.loss) && cfg.k < 1) throw ConfigError("k must be at least 1");
  if (cfg.loss == LossKind::kEntmax && !(cfg.alpha > 1.0 && cfg.alpha <= 2.0)) {
    throw ConfigError("entmax alpha must lie in (1, 2]");
  }
  if (cfg.proposal == ProposalKind::kDns &&
      (cfg.dns_pool < cfg.dns_top || cfg.dns_top < 1)) {
    throw ConfigError("DNS requires pool >= top >= 1");
  }
  for (Index c : cfg.cutoffs) {
    if (c < 1) throw ConfigError("cutoffs must be positive");
  }
}

namespace {

// Accumulates row gradients of one factor matrix and applies the update.
// Touched rows get compact slots, so sampled losses keep an O(batch k)
// working set instead of a dense copy of the table.
class RowGradients {
 public:
  RowGradients(Index rows, Index dim, Optimizer opt)
      : slot_(static_cast<std::size_t>(rows), -1), dim_(dim), opt_(opt) {
    if (opt != Optimizer::kSgd) state1_ = FactorMatrix::Zero(rows, dim);
    if (opt == Optimizer::kAdam) state2_ = FactorMatrix::Zero(rows, dim);
  }

  auto row(Index r) {
    Index& slot = slot_[static_cast<std::size_t>(r)];
    if (slot < 0) {
      slot = static_cast<Index>(list_.size());
      list_.push_back(r);
      if (slot >= buf_.rows()) buf_.conservativeResize(std::max<Index>(64, 2 * slot), dim_);
      buf_.row(slot).setZero();
    }
    return buf_.row(slot);
  }

  // theta <- theta - lr * (g + decay * theta), decay applied to every row.
  void apply(FactorMatrix& theta, double lr, double decay, long step) {
    if (decay > 0.0) {
      for (Index r = 0; r < theta.rows(); ++r) update(theta, r, lr, decay, step);
    } else {
      for (Index r : list_) update(theta, r, lr, decay, step);
    }
    for (Index r : list_) slot_[static_cast<std::size_t>(r)] = -1;
    list_.clear();
  }

 private:
  void update(FactorMatrix& theta, Index r, double lr, double decay, long step) {
    const Index slot = slot_[static_cast<std::size_t>(r)];
    for (Index f = 0; f < theta.cols(); ++f) {
      const double g = (slot < 0 ? 0.0 : buf_(slot, f)) + decay * theta(r, f);
      switch (opt_) {
        case Optimizer::kSgd:
          theta(r, f) -= lr * g;
          break;
        case Optimizer::kAdagrad:
          state1_(r, f) += g * g;
          theta(r, f) -= lr * g / (std::sqrt(state1_(r, f)) + 1e-10);
          break;
        case Optimizer::kAdam: {
          constexpr double b1 = 0.9;
          constexpr double b2 = 0.999;
          state1_(r, f) = b1 * state1_(r, f) + (1.0 - b1) * g;
          state2_(r, f) = b2 * state2_(r, f) + (1.0 - b2) * g * g;
          const double m_hat = state1_(r, f) / (1.0 - std::pow(b1, double(step)));
          const double v_hat = state2_(r, f) / (1.0 - std::pow(b2, double(step)));
          theta(r, f) -= lr * m_hat / (std::sqrt(v_hat) + 1e-8);
          break;
        }
      }
    }
  }

  std::vector<Index> slot_;
  std::vector<Index> list_;
  FactorMatrix buf_;
  Index dim_;
  Optimizer opt_;
  FactorMatrix state1_;
  FactorMatrix state2_;
};

ProposalDist make_proposal(const TrainConfig& cfg, const InteractionSet& data) {
  switch (cfg.proposal) {
    case ProposalKind::kUniform:
      return ProposalDist::Uniform(data.n_items);
    case ProposalKind::kLogUniform:
      return ProposalDist::LogUniform(data.n_items);
    case ProposalKind::kEmpirical: {
      // Training popularity with add-one smoothing keeps every q_j > 0.
      Vector freq = Vector::Ones(data.n_items);
      for (const Interaction& r : data.rows) {
        if (r.split == Split::kTrain) freq[r.item] += r.weight;
      }
      return ProposalDist::Empirical(freq);
    }
    case ProposalKind::kDns:
      return ProposalDist::Dns(data.n_items, cfg.dns_pool, cfg.dns_top);
  }
  throw ConfigError("unknown proposal");
}

HuffmanTree make_tree(const TrainConfig& cfg, const InteractionSet& data) {
  if (cfg.tree == TreeKind::kBalanced) return build_balanced(data.n_items);
  Vector freq = Vector::Ones(data.n_items);
  for (const Interaction& r : data.rows) {
    if (r.split == Split::kTrain) freq[r.item] += r.weight;
  }
  return build_huffman(freq, cfg.seed);
}

bool bad_loss(double v) { return !std::isfinite(v) || v > kDivergenceThreshold; }

}  // namespace

Vector user_scores(const MFModel& model, Index user, const HuffmanTree* tree) {
  const auto u = model.user_factors.row(user).transpose();
  if (tree == nullptr) return model.item_factors * u;
  const Vector node = model.node_factors * u;
  Vector s(tree->num_classes());
  for (Index j = 0; j < tree->num_classes(); ++j) {
    double log_p = 0.0;
    for (const PathStep& step : tree->path(j)) {
      log_p -= softplus(-step.sign * node[step.node]);
    }
    s[j] = log_p;
  }
  return s;
}

MetricsReport evaluate_model(const MFModel& model, const InteractionSet& data,
                             Split split, const std::vector<Index>& cutoffs,
                             const HuffmanTree* tree) {
  const auto relevant = data.items_by_user(split);
  const auto seen_train = data.items_by_user(Split::kTrain);
  const auto seen_valid = data.items_by_user(Split::kValid);
  std::vector<Index> users;
  for (Index u = 0; u < data.n_users; ++u) {
    if (!relevant[u].empty()) users.push_back(u);
  }
  if (users.empty()) throw DomainError("no users to evaluate");
  const Index depth = *std::max_element(cutoffs.begin(), cutoffs.end());
  std::vector<MetricsReport> reports(users.size());
  parallel_for(static_cast<Index>(users.size()), [&](Index i) {
    const Index u = users[i];
    const Vector s = user_scores(model, u, tree);
    std::vector<bool> excluded(static_cast<std::size_t>(data.n_items), false);
    for (Index j : seen_train[u]) excluded[j] = true;
    if (split == Split::kTest) {
      for (Index j : seen_valid[u]) excluded[j] = true;
    }
    const RankedList top = RankedList::top(s, depth, &excluded);
    reports[i] = evaluate_ranking(top.permutation, relevant[u], cutoffs);
  });
  return average(reports);
}

TrainResult train(MFModel model, const InteractionSet& data,
                  const TrainConfig& cfg) {
  validate(cfg);
  if (model.user_factors.rows() != data.n_users ||
      model.item_factors.rows() != data.n_items) {
    throw ConfigError("model shape does not match the data");
  }
  const bool hsm = cfg.loss == LossKind::kHsm;
  if (hsm && model.node_factors.rows() != data.n_items - 1) {
    throw ConfigError("HSM needs node factors for n_items - 1 internal nodes");
  }
  const Index dim = model.dim();
  const Index n_items = data.n_items;

  std::vector<std::pair<std::uint32_t, std::uint32_t>> examples;
  for (const Interaction& r : data.rows) {
    if (r.split == Split::kTrain) examples.emplace_back(r.user, r.item);
  }
  if (examples.empty()) throw DomainError("no training interactions");
  const auto n_examples = static_cast<double>(examples.size());

  TrainResult result;
  std::optional<ProposalDist> proposal;
  if (is_sampled(cfg.loss)) proposal = make_proposal(cfg, data);
  if (hsm) result.tree = make_tree(cfg, data);
  const bool dns = proposal && proposal->kind() == ProposalKind::kDns;
  std::vector<std::vector<Index>> dns_seen;
  if (dns && cfg.dns_exclude_positives) dns_seen = data.items_by_user(Split::kTrain);

  RowGradients g_user(data.n_users, dim, cfg.optimizer);
  RowGradients g_item(n_items, dim, cfg.optimizer);
  std::optional<RowGradients> g_node;
  if (hsm) g_node.emplace(n_items - 1, dim, cfg.optimizer);

  const RegularizerKind reg =
      cfg.loss == LossKind::kSparsemax ? RegularizerKind::HalfSquaredL2()
      : cfg.loss == LossKind::kEntmax  ? RegularizerKind::TsallisNeg(cfg.alpha)
                                       : RegularizerKind::ShannonNeg();

  std::vector<double> logits;
  std::vector<double> offsets;
  std::vector<Index> classes;
  Vector s(n_items);
  Vector g(n_items);
  long step = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    Stream rng(cfg.seed, static_cast<std::uint64_t>(epoch));
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[rng.below(i + 1)]);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    double loss_total = 0.0;
    bool diverged = false;

    for (std::size_t begin = 0; begin < order.size() && !diverged;
         begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      for (std::size_t b = begin; b < end; ++b) {
        const auto [user, y] = examples[order[b]];
        const auto u = model.user_factors.row(user);
        double value = 0.0;

        if (hsm) {
          const HuffmanTree& tree = *result.tree;
          auto gu = g_user.row(user);
          for (const PathStep& st : tree.path(y)) {
            const double z = model.node_factors.row(st.node).dot(u);
            value += softplus(-st.sign * z);
            const double gz = -st.sign * sigmoid(-st.sign * z);
            gu += gz * model.node_factors.row(st.node);
            g_node->row(st.node) += gz * u;
          }
          rec.score_evals += tree.depth(y);
        } else if (is_sampled(cfg.loss)) {
          classes.clear();
          classes.push_back(y);
          if (dns) {
            const SampleDraw draw = draw_dns(
                n_items, cfg.dns_pool, cfg.dns_top, rng,
                [&](Index c) {
                  if (!dns_seen.empty() &&
                      std::binary_search(dns_seen[user].begin(), dns_seen[user].end(), c)) {
                    return -kInf;
                  }
                  return model.item_factors.row(c).dot(u);
                });
            classes.insert(classes.end(), draw.negatives.begin(), draw.negatives.end());
            rec.score_evals += cfg.dns_pool + 1;
          } else {
            for (Index i = 0; i < cfg.k; ++i) classes.push_back(proposal->sample(rng));
            rec.score_evals += cfg.k + 1;
          }
          const auto kk = static_cast<double>(classes.size() - 1);
          logits.resize(classes.size());
          for (std::size_t i = 0; i < classes.size(); ++i) {
            logits[i] = model.item_factors.row(classes[i]).dot(u);
          }
          CompactEval ce;
          if (cfg.loss == LossKind::kNce) {
            offsets.resize(classes.size());
            for (std::size_t i = 0; i < classes.size(); ++i) {
              offsets[i] = std::log(kk * proposal->q(classes[i]));
            }
            ce = nce_compact(logits, offsets);
          } else {
            if (cfg.loss == LossKind::kSsm) {
              for (std::size_t i = 0; i < classes.size(); ++i) {
                logits[i] -= std::log(proposal->q(classes[i]));
              }
            }
            ce = sampled_softmax_compact(logits);
          }
          value = ce.value;
          auto gu = g_user.row(user);
          for (std::size_t i = 0; i < classes.size(); ++i) {
            gu += ce.gradient[i] * model.item_factors.row(classes[i]);
            g_item.row(classes[i]) += ce.gradient[i] * u;
          }
        } else {
          s.noalias() = model.item_factors * u.transpose();
          rec.score_evals += n_items;
          switch (cfg.loss) {
            case LossKind::kSoftmax: {
              const double lse = log_sum_exp(s);
              value = lse - s[y];
              g = (s.array() - lse).exp().matrix();
              g[y] -= 1.0;
              break;
            }
            case LossKind::kSparsemax:
            case LossKind::kEntmax: {
              LossEval le = fy_loss(s, LabelVector::one_hot(n_items, y), reg);
              value = le.value;
              g = std::move(le.gradient);
              break;
            }
            case LossKind::kRankmax: {
              LossEval le = rankmax_loss(s, y);
              value = le.value;
              g = std::move(le.gradient);
              break;
            }
            case LossKind::kRg: {
              const double c = static_cast<double>(n_items);
              value = rg_partition(s) - s[y];
              g = s / c;
              g.array() += 1.0 / c - s.sum() / (c * c);
              g[y] -= 1.0;
              break;
            }
            default:
              break;
          }
          g_user.row(user) += g.transpose() * model.item_factors;
          for (Index j = 0; j < n_items; ++j) {
            if (g[j] != 0.0) g_item.row(j) += g[j] * u;
          }
        }

        loss_total += value;
        if (bad_loss(value)) {
          diverged = true;
          rec.train_loss = value;
          break;
        }
      }
      if (diverged) break;
      ++step;
      const double decay =
          cfg.l2 * static_cast<double>(end - begin) / n_examples;
      g_user.apply(model.user_factors, cfg.learning_rate, decay, step);
      g_item.apply(model.item_factors, cfg.learning_rate, decay, step);
      if (hsm) g_node->apply(model.node_factors, cfg.learning_rate, decay, step);
    }

    rec.wall_time_s = std::max(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(),
        1e-9);
    if (!diverged) {
      rec.train_loss = loss_total / n_examples;
      diverged = bad_loss(rec.train_loss) || !model.user_factors.allFinite() ||
                 !model.item_factors.allFinite();
    }
    if (diverged) {
      rec.diverged = true;
      result.records.push_back(rec);
      result.diverged = true;
      result.diagnostic = "loss exceeded 1e10 or became non-finite in epoch " +
                          std::to_string(epoch);
      break;
    }
    if (cfg.evaluate) {
      rec.metrics = evaluate_model(model, data, cfg.eval_split, cfg.cutoffs,
                                   result.tree ? &*result.tree : nullptr);
    }
    result.records.push_back(rec);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace fybench
