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

#include "experiments.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fybench/checkpoint.h"
#include "fybench/convergence.h"
#include "fybench/datasets.h"
#include "fybench/divergence.h"
#include "fybench/fy_losses.h"
#include "fybench/huffman.h"
#include "fybench/oracles.h"
#include "fybench/parallel.h"
#include "fybench/random.h"
#include "fybench/simplex_maps.h"
#include "fybench/trainer.h"
#include "output.h"

namespace fybench::cli {

namespace {

std::uint64_t master_seed(const Json& c) {
  const long long s = get_int(c, "seed");
  if (s < 0) throw ConfigError("seed must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

Index positive_int(const Json& c, const std::string& key, long long min = 1) {
  const long long v = get_int(c, key);
  if (v < min) throw ConfigError("'" + key + "' must be at least " + std::to_string(min));
  return static_cast<Index>(v);
}

std::string out_dir(const Json& c) {
  const std::string dir = get_string(c, "out");
  if (dir.empty()) throw ConfigError("'out' must name a directory");
  ensure_dir(dir);
  return dir;
}

Vector random_direction(Index size, double norm, Stream& rng) {
  Vector v(size);
  for (Index i = 0; i < size; ++i) v[i] = rng.normal();
  return v * (norm / v.norm());
}

Index argmax(const Vector& v) {
  Index best = 0;
  v.maxCoeff(&best);
  return best;
}

// ---------------------------------------------------------------- biasvar

struct BiasVarPoint {
  Scheme scheme;
  Index k = 0;
  std::string proposal;
  Index profile = 0;
};

ProposalDist make_biasvar_proposal(const std::string& name, const Vector& s,
                                   double mixture_weight) {
  const Index c = s.size();
  if (name == "uniform") return ProposalDist::Uniform(c);
  if (name == "loguniform") return ProposalDist::LogUniform(c);
  if (name == "mixture") {
    const Vector uniform = Vector::Constant(c, 1.0 / static_cast<double>(c));
    return ProposalDist::Empirical((1.0 - mixture_weight) * uniform +
                                   mixture_weight * softmax_map(s));
  }
  throw ConfigError("unknown proposal '" + name + "' (uniform, loguniform, mixture)");
}

}  // namespace

Json biasvar_defaults() {
  return Json::parse(R"({
    "schemes": ["ssm", "nce"],
    "k": [5, 10, 50, 100],
    "proposals": ["uniform", "mixture"],
    "mixture_weight": 0.5,
    "classes": 20,
    "profiles": 2,
    "logit_norm": 1.0,
    "trials": 20000,
    "seed": 1,
    "out": "biasvar_out"
  })");
}

void cmd_biasvar(const Json& c, std::ostream& out) {
  const std::uint64_t seed = master_seed(c);
  const Index classes = positive_int(c, "classes", 2);
  const Index profiles = positive_int(c, "profiles");
  const Index trials = positive_int(c, "trials", 100);
  const double norm = get_double(c, "logit_norm");
  const double mix = get_double(c, "mixture_weight");
  if (!(norm >= 0.0)) throw ConfigError("'logit_norm' must be nonnegative");
  if (!(mix >= 0.0 && mix < 1.0)) throw ConfigError("'mixture_weight' must lie in [0, 1)");
  std::vector<Scheme> schemes;
  for (const auto& name : get_strings(c, "schemes")) {
    try {
      schemes.push_back(parse_scheme(name));
    } catch (const std::exception&) {
      throw ConfigError("unknown scheme '" + name + "'");
    }
  }
  const auto ks = get_ints(c, "k");
  const auto proposals = get_strings(c, "proposals");
  for (long long k : ks) {
    if (k < 1) throw ConfigError("every k must be positive");
  }
  for (const auto& p : proposals) make_biasvar_proposal(p, Vector::Zero(classes), mix);

  // Profiles: logits, node logits for HSM and the true class.
  std::vector<Vector> logits;
  std::vector<Vector> node_logits;
  const HuffmanTree tree = build_balanced(classes);
  for (Index p = 0; p < profiles; ++p) {
    Stream rng(seed, static_cast<std::uint64_t>(p));
    logits.push_back(random_direction(classes, norm, rng));
    node_logits.push_back(random_direction(classes - 1, norm, rng));
  }

  std::vector<BiasVarPoint> grid;
  for (Scheme s : schemes) {
    const bool sampled = s == Scheme::kSsmSimple || s == Scheme::kSsm || s == Scheme::kNce;
    for (Index p = 0; p < profiles; ++p) {
      if (!sampled) {
        grid.push_back({s, 0, "none", p});
        continue;
      }
      for (long long k : ks) {
        for (const auto& q : proposals) grid.push_back({s, static_cast<Index>(k), q, p});
      }
    }
  }

  std::vector<std::vector<std::string>> rows(grid.size());
  parallel_for(static_cast<Index>(grid.size()), [&](Index i) {
    const BiasVarPoint& pt = grid[static_cast<std::size_t>(i)];
    const Vector& s = logits[static_cast<std::size_t>(pt.profile)];
    const Index y = argmax(s);
    std::optional<ProposalDist> q;
    SchemeInputs in;
    std::string chi2_text;
    if (pt.proposal != "none") {
      q = make_biasvar_proposal(pt.proposal, s, mix);
      in.proposal = &*q;
      in.k = pt.k;
      chi2_text = fmt(chi2(softmax_map(s), q->probabilities()));
    }
    in.tree = &tree;
    in.node_logits = &node_logits[static_cast<std::size_t>(pt.profile)];
    const DeltaReport d = delta_report(pt.scheme, s, y, in);
    const EmpiricalReport e =
        empirical_report(pt.scheme, s, y, in, trials, derive_seed(seed, 1000 + i));
    rows[static_cast<std::size_t>(i)] = {
        to_string(pt.scheme), std::to_string(pt.k), pt.proposal,
        std::to_string(pt.profile), std::to_string(classes), std::to_string(y),
        chi2_text, fmt(d.bias_asymptotic), fmt(d.bias_curvature), fmt(d.variance),
        fmt(e.bias_hat), fmt(e.variance_hat), fmt(e.std_error), std::to_string(e.trials)};
  });

  const std::string dir = out_dir(c);
  CsvWriter csv(dir + "/biasvar.csv",
                {"scheme", "k", "proposal", "profile", "classes", "true_class", "chi2",
                 "bias_asym", "bias_curv", "variance", "bias_hat", "variance_hat",
                 "std_error", "trials"});
  for (const auto& r : rows) csv.row(r);
  write_manifest(dir, "biasvar", c);
  out << "wrote " << rows.size() << " rows to " << csv.path() << '\n';
}

// ------------------------------------------------------------------ train

Json train_defaults() {
  return Json::parse(R"({
    "dataset": {
      "source": "planted",
      "path": "",
      "threshold": 3.0,
      "kcore": 0,
      "users": 500,
      "items": 200,
      "dim": 8,
      "temperature": 2.0,
      "per_user": 20,
      "split": [0.8, 0.1, 0.1],
      "shuffle": true
    },
    "backbone": "mf",
    "loss": "softmax",
    "solver": "sgd",
    "alpha": 1.5,
    "lr": 0.05,
    "l2": 0.0001,
    "epochs": 10,
    "batch": 256,
    "k": 10,
    "proposal": "uniform",
    "dns_pool": 500,
    "dns_top": 100,
    "dns_exclude_positives": true,
    "tree": "huffman",
    "optimizer": "sgd",
    "dim": 16,
    "init_scale": 0.1,
    "cutoffs": [20],
    "eval_split": "valid",
    "checkpoint": true,
    "seed": 1,
    "out": "train_out",
    "sweep": {"lr": [], "k": [], "q": [], "seed": []}
  })");
}

namespace {

ProposalKind parse_proposal_kind(const std::string& name) {
  if (name == "uniform") return ProposalKind::kUniform;
  if (name == "loguniform") return ProposalKind::kLogUniform;
  if (name == "empirical") return ProposalKind::kEmpirical;
  if (name == "dns") return ProposalKind::kDns;
  throw ConfigError("unknown proposal '" + name + "' (uniform, loguniform, empirical, dns)");
}

std::string proposal_name(ProposalKind k) {
  switch (k) {
    case ProposalKind::kUniform:
      return "uniform";
    case ProposalKind::kLogUniform:
      return "loguniform";
    case ProposalKind::kEmpirical:
      return "empirical";
    case ProposalKind::kDns:
      return "dns";
  }
  return "uniform";
}

InteractionSet load_dataset(const Json& c, std::uint64_t seed) {
  const std::string source = get_string(c, "dataset.source");
  InteractionSet data;
  bool presplit = false;
  if (source == "planted") {
    data = synth_planted(positive_int(c, "dataset.users"), positive_int(c, "dataset.items", 2),
                         positive_int(c, "dataset.dim"), get_double(c, "dataset.temperature"),
                         positive_int(c, "dataset.per_user"), derive_seed(seed, 1))
               .data;
  } else if (source == "file") {
    const std::string path = get_string(c, "dataset.path");
    if (path.empty()) throw ConfigError("dataset.path is required for a file source");
    data = load_tsv(path, get_double(c, "dataset.threshold")).data;
  } else if (source == "cache") {
    data = load_cache(get_string(c, "dataset.path"));
    presplit = true;
  } else {
    throw ConfigError("dataset.source must be planted, file or cache");
  }
  const Index kcore = positive_int(c, "dataset.kcore", 0);
  if (kcore > 0) data = k_core_filter(data, kcore).data;
  if (presplit) return data;
  const auto r = get_doubles(c, "dataset.split");
  if (r.size() != 3) throw ConfigError("dataset.split needs three ratios");
  return split_per_user(data, {r[0], r[1], r[2]}, derive_seed(seed, 2),
                        get_bool(c, "dataset.shuffle"))
      .data;
}

TrainConfig base_train_config(const Json& c) {
  TrainConfig t;
  try {
    t.loss = parse_loss(get_string(c, "loss"));
    t.optimizer = parse_optimizer(get_string(c, "optimizer"));
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
  t.alpha = get_double(c, "alpha");
  t.learning_rate = get_double(c, "lr");
  t.l2 = get_double(c, "l2");
  t.epochs = static_cast<int>(positive_int(c, "epochs"));
  t.batch_size = positive_int(c, "batch");
  t.k = positive_int(c, "k");
  t.proposal = parse_proposal_kind(get_string(c, "proposal"));
  t.dns_pool = positive_int(c, "dns_pool");
  t.dns_top = positive_int(c, "dns_top");
  t.dns_exclude_positives = get_bool(c, "dns_exclude_positives");
  const std::string tree = get_string(c, "tree");
  if (tree != "huffman" && tree != "balanced") throw ConfigError("tree must be huffman or balanced");
  t.tree = tree == "huffman" ? TreeKind::kHuffman : TreeKind::kBalanced;
  t.seed = master_seed(c);
  t.cutoffs.clear();
  for (long long k : get_ints(c, "cutoffs")) t.cutoffs.push_back(static_cast<Index>(k));
  if (t.cutoffs.empty()) throw ConfigError("cutoffs must not be empty");
  const std::string split = get_string(c, "eval_split");
  if (split != "valid" && split != "test") throw ConfigError("eval_split must be valid or test");
  t.eval_split = split == "valid" ? Split::kValid : Split::kTest;
  validate(t);
  return t;
}

struct TrainPoint {
  TrainConfig cfg;
  std::string tag;
};

// Cartesian product of the sweep axes in the order lr, k, q, seed.
std::vector<TrainPoint> expand_sweep(const Json& c, const TrainConfig& base) {
  const auto lrs = get_doubles(c, "sweep.lr");
  const auto ks = get_ints(c, "sweep.k");
  const auto qs = get_strings(c, "sweep.q");
  const auto seeds = get_ints(c, "sweep.seed");
  std::vector<TrainPoint> points{{base, ""}};
  auto expand = [&points](auto values, auto apply) {
    if (values.empty()) return;
    std::vector<TrainPoint> next;
    for (const TrainPoint& p : points) {
      for (const auto& v : values) {
        TrainPoint q = p;
        apply(q, v);
        next.push_back(q);
      }
    }
    points = std::move(next);
  };
  auto add_tag = [](TrainPoint& p, const std::string& part) {
    p.tag += (p.tag.empty() ? "" : "_") + part;
  };
  expand(lrs, [&](TrainPoint& p, double v) {
    p.cfg.learning_rate = v;
    add_tag(p, "lr" + fmt(v, 6));
  });
  expand(ks, [&](TrainPoint& p, long long v) {
    p.cfg.k = static_cast<Index>(v);
    add_tag(p, "k" + std::to_string(v));
  });
  expand(qs, [&](TrainPoint& p, const std::string& v) {
    p.cfg.proposal = parse_proposal_kind(v);
    add_tag(p, "q" + v);
  });
  expand(seeds, [&](TrainPoint& p, long long v) {
    if (v < 0) throw ConfigError("sweep seeds must be nonnegative");
    p.cfg.seed = static_cast<std::uint64_t>(v);
    add_tag(p, "seed" + std::to_string(v));
  });
  for (TrainPoint& p : points) {
    validate(p.cfg);
    if (p.tag.empty()) p.tag = "train";
  }
  return points;
}

const char* const kMetricNames[] = {"precision", "recall", "ndcg", "topk_error"};

void metric_rows(const MetricsReport& m,
                 const std::function<void(const std::string&, Index, double)>& emit) {
  for (std::size_t i = 0; i < m.cutoffs.size(); ++i) {
    emit(kMetricNames[0], m.cutoffs[i], m.precision[i]);
    emit(kMetricNames[1], m.cutoffs[i], m.recall[i]);
    emit(kMetricNames[2], m.cutoffs[i], m.ndcg[i]);
    emit(kMetricNames[3], m.cutoffs[i], m.topk_error[i]);
  }
}

struct PointOutcome {
  bool diverged = false;
  int epochs = 0;
  std::optional<MetricsReport> final_metrics;
};

PointOutcome run_point(const TrainPoint& p, const InteractionSet& data, const Json& c,
                       const std::string& dir) {
  const bool als = get_string(c, "solver") == "als";
  const Index dim = positive_int(c, "dim");
  const double scale = get_double(c, "init_scale");
  const bool hsm = p.cfg.loss == LossKind::kHsm;
  MFModel model = init_model(data.n_users, data.n_items, dim, scale,
                             derive_seed(p.cfg.seed, 3), hsm);

  std::vector<EpochRecord> records;
  std::optional<HuffmanTree> tree;
  std::vector<double> objectives;
  bool diverged = false;
  if (als) {
    AlsResult r = train_rg_als(std::move(model), data, p.cfg);
    model = std::move(r.model);
    records = std::move(r.records);
    objectives = std::move(r.half_sweep_objectives);
  } else {
    TrainResult r = train(std::move(model), data, p.cfg);
    model = std::move(r.model);
    records = std::move(r.records);
    tree = std::move(r.tree);
    diverged = r.diverged;
  }

  const std::string base = dir + "/" + p.tag;
  CsvWriter curve(base + ".csv", {"epoch", "status", "train_loss", "score_evals",
                                  "cumulative_score_evals", "metric", "cutoff", "value"});
  CsvWriter timing(base + "_timing.csv", {"epoch", "wall_time_s", "cumulative_time_s"});
  Index cumulative_evals = 0;
  double cumulative_time = 0.0;
  PointOutcome outcome;
  for (const EpochRecord& rec : records) {
    cumulative_evals += rec.score_evals;
    cumulative_time += rec.wall_time_s;
    const std::string epoch = std::to_string(rec.epoch);
    timing.row({epoch, fmt(rec.wall_time_s, 6), fmt(cumulative_time, 6)});
    if (rec.diverged) {
      curve.row({epoch, "DIVERGED", fmt(rec.train_loss), std::to_string(rec.score_evals),
                 std::to_string(cumulative_evals), "", "", ""});
      continue;
    }
    outcome.epochs = rec.epoch;
    const std::vector<std::string> head = {epoch, "ok", fmt(rec.train_loss),
                                           std::to_string(rec.score_evals),
                                           std::to_string(cumulative_evals)};
    if (!rec.metrics) {
      auto row = head;
      row.insert(row.end(), {"", "", ""});
      curve.row(row);
      continue;
    }
    metric_rows(*rec.metrics, [&](const std::string& name, Index k, double v) {
      auto row = head;
      row.insert(row.end(), {name, std::to_string(k), fmt(v)});
      curve.row(row);
    });
  }
  outcome.diverged = diverged;
  if (!diverged) {
    if (get_bool(c, "checkpoint")) {
      save_checkpoint(base + ".ckpt", model, p.cfg.seed, to_string(p.cfg.loss));
    }
    if (!objectives.empty()) {
      CsvWriter obj(base + "_objective.csv", {"half_sweep", "objective"});
      for (std::size_t i = 0; i < objectives.size(); ++i) {
        obj.row({std::to_string(i + 1), fmt(objectives[i], 15)});
      }
    }
    if (data.count(Split::kTest) > 0) {
      outcome.final_metrics = evaluate_model(model, data, Split::kTest, p.cfg.cutoffs,
                                             tree ? &*tree : nullptr);
    }
  }
  return outcome;
}

}  // namespace

void cmd_train(const Json& c, std::ostream& out) {
  const std::string backbone = get_string(c, "backbone");
  const std::string loss = get_string(c, "loss");
  if (backbone != "mf") {
    if (loss == "hsm") {
      throw ConfigError("hsm trains only with the mf backbone (got '" + backbone + "')");
    }
    throw ConfigError("unknown backbone '" + backbone + "'; only mf is implemented");
  }
  const std::string solver = get_string(c, "solver");
  if (solver != "sgd" && solver != "als") throw ConfigError("solver must be sgd or als");
  if (solver == "als" && loss != "rg") throw ConfigError("the als solver requires loss rg");

  const TrainConfig base = base_train_config(c);
  const std::vector<TrainPoint> points = expand_sweep(c, base);
  const InteractionSet data = load_dataset(c, master_seed(c));
  const std::string dir = out_dir(c);

  std::vector<PointOutcome> outcomes(points.size());
  parallel_for(static_cast<Index>(points.size()), [&](Index i) {
    outcomes[static_cast<std::size_t>(i)] =
        run_point(points[static_cast<std::size_t>(i)], data, c, dir);
  });

  CsvWriter summary(dir + "/summary.csv", {"point", "lr", "k", "proposal", "seed", "status",
                                           "epochs", "metric", "cutoff", "value"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    const TrainConfig& t = points[i].cfg;
    const PointOutcome& o = outcomes[i];
    const std::vector<std::string> head = {points[i].tag, fmt(t.learning_rate, 6),
                                           std::to_string(t.k), proposal_name(t.proposal),
                                           std::to_string(t.seed),
                                           o.diverged ? "DIVERGED" : "ok",
                                           std::to_string(o.epochs)};
    if (!o.final_metrics) {
      auto row = head;
      row.insert(row.end(), {"", "", ""});
      summary.row(row);
      continue;
    }
    metric_rows(*o.final_metrics, [&](const std::string& name, Index k, double v) {
      auto row = head;
      row.insert(row.end(), {name, std::to_string(k), fmt(v)});
      summary.row(row);
    });
  }
  write_manifest(dir, "train", c);
  out << "trained " << points.size() << " point(s); outputs in " << dir << '\n';
}

// ------------------------------------------------------------------ bench

Json bench_defaults() {
  return Json::parse(R"({
    "losses": ["softmax", "ssm"],
    "classes": [256, 512, 1024, 2048, 4096, 8192],
    "examples": 2000,
    "k": 10,
    "dim": 16,
    "repeats": 3,
    "tree": "balanced",
    "seed": 7,
    "out": "bench_out"
  })");
}

void cmd_bench(const Json& c, std::ostream& out) {
  ComplexityOptions opts;
  opts.n_examples = positive_int(c, "examples");
  opts.k = positive_int(c, "k");
  opts.dim = positive_int(c, "dim");
  opts.repeats = static_cast<int>(positive_int(c, "repeats"));
  opts.seed = master_seed(c);
  const std::string tree = get_string(c, "tree");
  if (tree != "huffman" && tree != "balanced") throw ConfigError("tree must be huffman or balanced");
  opts.tree = tree == "huffman" ? TreeKind::kHuffman : TreeKind::kBalanced;
  std::vector<Index> classes;
  for (long long v : get_ints(c, "classes")) {
    if (v < 2) throw ConfigError("every C must be at least 2");
    classes.push_back(static_cast<Index>(v));
  }
  if (classes.size() < 2) throw ConfigError("bench needs at least two values of C");
  std::vector<LossKind> losses;
  for (const auto& name : get_strings(c, "losses")) {
    try {
      losses.push_back(parse_loss(name));
    } catch (const UsageError& e) {
      throw ConfigError(e.what());
    }
  }

  const std::string dir = out_dir(c);
  CsvWriter evals(dir + "/bench.csv", {"loss", "classes", "score_evals", "evals_slope"});
  CsvWriter timing(dir + "/bench_timing.csv", {"loss", "classes", "median_time_s", "time_slope"});
  // Timed runs stay sequential so workers do not compete for cores.
  for (LossKind loss : losses) {
    const ComplexityProfile prof = complexity_profile(loss, classes, opts);
    for (const ComplexityPoint& pt : prof.points) {
      evals.row({to_string(loss), std::to_string(pt.num_classes),
                 std::to_string(pt.score_evals), fmt(prof.evals_slope)});
      timing.row({to_string(loss), std::to_string(pt.num_classes), fmt(pt.median_time_s, 6),
                  fmt(prof.time_slope, 6)});
    }
    out << to_string(loss) << ": evals slope " << fmt(prof.evals_slope, 6)
        << ", time slope " << fmt(prof.time_slope, 3) << '\n';
  }
  write_manifest(dir, "bench", c);
}

// ------------------------------------------------------------ calibration

Json calibration_defaults() {
  return Json::parse(R"({
    "mappings": ["softmax", "sparsemax", "entmax", "rankmax"],
    "alpha": 1.5,
    "classes": 6,
    "k": [],
    "trials": 1000,
    "order_trials": 10000,
    "order_classes": 5,
    "dump_examples": 32,
    "dump_scale": 1.5,
    "seed": 1,
    "out": "calibration_out"
  })");
}

namespace {

Json witness_json(const std::optional<OrderWitness>& w) {
  if (!w) return nullptr;
  return {{"scores", std::vector<double>(w->scores.begin(), w->scores.end())},
          {"probabilities",
           std::vector<double>(w->probabilities.begin(), w->probabilities.end())},
          {"i", w->i},
          {"j", w->j}};
}

Vector mapping_gradient(const std::string& name, double alpha, const Vector& s, Index y) {
  const LabelVector label = LabelVector::one_hot(s.size(), y);
  if (name == "softmax") return softmax_loss(s, label).gradient;
  if (name == "sparsemax") return fy_loss(s, label, RegularizerKind::HalfSquaredL2()).gradient;
  if (name == "entmax") return fy_loss(s, label, RegularizerKind::TsallisNeg(alpha)).gradient;
  return rankmax_grad(s, y);
}

}  // namespace

void cmd_calibration(const Json& c, std::ostream& out) {
  const std::uint64_t seed = master_seed(c);
  const double alpha = get_double(c, "alpha");
  const Index classes = positive_int(c, "classes", 2);
  if (classes > 12) throw ConfigError("calibration enumerates at most 12 classes");
  const Index trials = positive_int(c, "trials");
  const Index order_trials = positive_int(c, "order_trials");
  const Index order_classes = positive_int(c, "order_classes", 2);
  const Index dump_examples = positive_int(c, "dump_examples", 0);
  const double dump_scale = get_double(c, "dump_scale");
  std::vector<Index> ks;
  for (long long k : get_ints(c, "k")) {
    if (k < 1 || k > classes) throw ConfigError("every k must lie in [1, classes]");
    ks.push_back(static_cast<Index>(k));
  }
  if (ks.empty()) {
    for (Index k = 1; k <= classes; ++k) ks.push_back(k);
  }
  const auto names = get_strings(c, "mappings");
  std::vector<MappingKind> kinds;
  for (const auto& name : names) {
    if (name != "softmax" && name != "sparsemax" && name != "entmax" && name != "rankmax") {
      throw ConfigError("unknown mapping '" + name + "'");
    }
    kinds.push_back(parse_mapping(name, alpha, 0));
  }

  const auto n = static_cast<Index>(kinds.size());
  std::vector<Json> verdicts(kinds.size());
  std::vector<Json> probes(kinds.size());
  parallel_for(n, [&](Index i) {
    const auto u = static_cast<std::size_t>(i);
    const CalibrationVerdict v =
        check_topk_calibration(kinds[u], classes, ks, trials, derive_seed(seed, 10 + u));
    verdicts[u] = Json::parse(v.to_json());
    const OrderReport r = classify_order_preservation(kinds[u], order_trials,
                                                      derive_seed(seed, 20 + u), order_classes);
    probes[u] = {{"mapping", names[u]},
                 {"verdict", to_string(r.verdict)},
                 {"trials", r.trials},
                 {"tie_witness_count", r.tie_witness_count},
                 {"inversion_count", r.inversion_count},
                 {"tie_witness", witness_json(r.tie_witness)},
                 {"inversion_witness", witness_json(r.inversion_witness)}};
  });

  const std::string dir = out_dir(c);
  Json report = {{"classes", classes}, {"k", ks}, {"verdicts", verdicts}, {"order_probes", probes}};
  Index total = 0;
  for (const auto& v : verdicts) total += v.value("violations", Index{0});
  report["total_violations"] = total;
  {
    std::ofstream f(dir + "/calibration.json", std::ios::binary);
    if (!f) throw DomainError("cannot write " + dir + "/calibration.json");
    f << report.dump(2) << '\n';
  }

  // Gradient dumps share one set of (s, y) draws across mappings.
  std::vector<Vector> scores;
  std::vector<Index> labels;
  Stream rng(seed, 30);
  for (Index e = 0; e < dump_examples; ++e) {
    Vector s(classes);
    for (Index j = 0; j < classes; ++j) s[j] = dump_scale * rng.normal();
    scores.push_back(s);
    labels.push_back(static_cast<Index>(rng.below(static_cast<std::uint64_t>(classes))));
  }
  std::vector<std::string> header = {"example", "true_class"};
  for (Index j = 0; j < classes; ++j) header.push_back("g" + std::to_string(j));
  for (const auto& name : names) {
    CsvWriter csv(dir + "/gradients_" + name + ".csv", header);
    for (std::size_t e = 0; e < scores.size(); ++e) {
      const Vector g = mapping_gradient(name, alpha, scores[e], labels[e]);
      std::vector<std::string> row = {std::to_string(e), std::to_string(labels[e])};
      for (Index j = 0; j < classes; ++j) row.push_back(fmt(g[j]));
      csv.row(row);
    }
  }
  write_manifest(dir, "calibration", c);
  out << "calibration: " << total << " violation(s); report in " << dir << "/calibration.json\n";
}

}  // namespace fybench::cli
