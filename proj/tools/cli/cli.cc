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

#include "cli.h"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "experiments.h"
#include "fybench/approx.h"
#include "fybench/fy_losses.h"
#include "fybench/huffman.h"
#include "fybench/proposal.h"
#include "fybench/simplex_maps.h"
#include "output.h"

namespace fybench::cli {

namespace {

Vector parse_vector(const std::string& text) {
  std::vector<double> values;
  std::string token;
  std::stringstream ss(text);
  while (std::getline(ss, token, ',')) {
    const auto first = token.find_first_not_of(" \t\r");
    const auto last = token.find_last_not_of(" \t\r");
    if (first == std::string::npos) throw UsageError("empty score in '" + text + "'");
    token = token.substr(first, last - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw UsageError("not a number: '" + token + "'");
    values.push_back(v);
  }
  if (values.empty()) throw UsageError("no scores given");
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

// Inline scores or one vector per non-empty line of a file.
std::vector<Vector> read_scores(const std::string& inline_text,
                                const std::string& path) {
  if (inline_text.empty() == path.empty()) {
    throw UsageError("give exactly one of --scores and --scores-file");
  }
  if (!inline_text.empty()) return {parse_vector(inline_text)};
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::vector<Vector> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_vector(line));
  }
  if (out.empty()) throw UsageError(path + " holds no scores");
  return out;
}

std::string join(const Vector& v, int digits) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt(v[i], digits);
  }
  return s;
}

struct MapArgs {
  std::string mapping = "softmax";
  double alpha = 1.5;
  Index true_class = 0;
  std::string scores;
  std::string scores_file;
};

void add_map_args(CLI::App* cmd, MapArgs& a) {
  cmd->add_option("--mapping", a.mapping, "softmax, sparsemax, entmax or rankmax")
      ->check(CLI::IsMember({"softmax", "sparsemax", "entmax", "rankmax"}));
  cmd->add_option("--alpha", a.alpha, "entmax alpha in (1, 2]");
  cmd->add_option("--true-class", a.true_class, "rankmax anchor class");
  cmd->add_option("--scores", a.scores, "comma-separated logits");
  cmd->add_option("--scores-file", a.scores_file, "one comma-separated vector per line");
}

void cmd_map(const MapArgs& a, std::ostream& out) {
  for (const Vector& s : read_scores(a.scores, a.scores_file)) {
    const MappingKind kind = parse_mapping(a.mapping, a.alpha, a.true_class);
    out << join(apply_mapping(s, kind).probabilities, 6) << '\n';
  }
}

void cmd_jacobian(const MapArgs& a, bool spectral, std::ostream& out) {
  for (const Vector& s : read_scores(a.scores, a.scores_file)) {
    const MappingKind kind = parse_mapping(a.mapping, a.alpha, a.true_class);
    const JacobianMatrix j = jacobian(s, kind);
    for (Index r = 0; r < j.entries.rows(); ++r) {
      out << join(j.entries.row(r).transpose(), 6) << '\n';
    }
    if (j.near_boundary) out << "near_boundary,1\n";
    if (spectral) out << "spectral_norm," << fmt(spectral_norm(j.entries).value, 6) << '\n';
  }
}

struct LossArgs {
  MapArgs map;
  std::string loss = "softmax";
  std::string labels;
  Index k = 10;
  std::string proposal = "uniform";
  std::uint64_t seed = 1;
};

LossEval evaluate_loss(const LossArgs& a, const Vector& s) {
  const std::string& name = a.loss;
  if (name == "hsm") {
    // Scores are the C - 1 node logits of a balanced tree.
    const HuffmanTree tree = build_balanced(s.size() + 1);
    check_class_index(a.map.true_class, tree.num_classes());
    return hsm_loss(s, a.map.true_class, tree);
  }
  const Index c = s.size();
  std::vector<Index> positives;
  if (a.labels.empty()) {
    positives.push_back(a.map.true_class);
  } else {
    for (double v : parse_vector(a.labels)) positives.push_back(static_cast<Index>(v));
  }
  for (Index p : positives) check_class_index(p, c);
  const LabelVector y = LabelVector::from_indices(c, positives);
  const Index y0 = positives.front();
  if (name == "softmax") return softmax_loss(s, y);
  if (name == "sparsemax") return fy_loss(s, y, RegularizerKind::HalfSquaredL2());
  if (name == "entmax") return fy_loss(s, y, RegularizerKind::TsallisNeg(a.map.alpha));
  if (name == "rankmax") return rankmax_loss(s, y0);
  if (name == "rg") return rg_loss(s, y);
  ProposalDist q = a.proposal == "uniform"      ? ProposalDist::Uniform(c)
                   : a.proposal == "loguniform" ? ProposalDist::LogUniform(c)
                                                : throw UsageError("--proposal must be uniform or loguniform");
  const SampleDraw draw = draw_negatives(q, a.k, a.seed, 0);
  if (name == "ssm_simple") return ssm_simple_loss(s, y0, draw);
  if (name == "ssm") return ssm_corrected_loss(s, y0, draw, q);
  if (name == "nce") return nce_loss(s, y0, draw, q);
  throw UsageError("unknown loss '" + name + "'");
}

void cmd_loss(const LossArgs& a, std::ostream& out) {
  for (const Vector& s : read_scores(a.map.scores, a.map.scores_file)) {
    const LossEval e = evaluate_loss(a, s);
    out << "value," << fmt(e.value, 10) << '\n';
    out << "gradient," << join(e.gradient, 10) << '\n';
  }
}

// Options shared by the config-driven commands.
struct ExperimentArgs {
  std::string config_path;
  std::vector<std::string> assignments;
  std::string out_dir;
  std::optional<long long> seed;
};

void add_experiment_args(CLI::App* cmd, ExperimentArgs& a) {
  cmd->add_option("--config", a.config_path, "JSON config document");
  cmd->add_option("--set", a.assignments, "override a config key: key.path=value");
  cmd->add_option("--out", a.out_dir, "output directory");
  cmd->add_option("--seed", a.seed, "master seed");
}

Json common_flags(const ExperimentArgs& a) {
  Json flags = Json::object();
  if (!a.out_dir.empty()) flags["out"] = a.out_dir;
  if (a.seed) flags["seed"] = *a.seed;
  return flags;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fenchel-Young loss benchmark toolkit", "fybench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(FYBENCH_VERSION));

  MapArgs map_args;
  auto* map_cmd = app.add_subcommand("map", "print the mapping of a score vector");
  add_map_args(map_cmd, map_args);

  MapArgs jac_args;
  bool spectral = false;
  auto* jac_cmd = app.add_subcommand("jacobian", "print the Jacobian of a mapping");
  add_map_args(jac_cmd, jac_args);
  jac_cmd->add_flag("--spectral", spectral, "also print the spectral norm");

  LossArgs loss_args;
  auto* loss_cmd = app.add_subcommand("loss", "print a loss value and its gradient");
  add_map_args(loss_cmd, loss_args.map);
  loss_cmd->add_option("--loss", loss_args.loss)
      ->check(CLI::IsMember({"softmax", "sparsemax", "entmax", "rankmax", "ssm_simple",
                             "ssm", "nce", "hsm", "rg"}));
  loss_cmd->add_option("--labels", loss_args.labels, "comma-separated positive classes");
  loss_cmd->add_option("--k", loss_args.k, "negatives for sampled losses")
      ->check(CLI::PositiveNumber);
  loss_cmd->add_option("--proposal", loss_args.proposal, "uniform or loguniform");
  loss_cmd->add_option("--seed", loss_args.seed, "seed of the negative draw");

  ExperimentArgs bv_args;
  auto* bv_cmd = app.add_subcommand("biasvar", "analytic and Monte-Carlo bias/variance grid");
  add_experiment_args(bv_cmd, bv_args);

  ExperimentArgs train_args;
  std::string train_loss;
  std::string train_backbone;
  std::string train_dataset;
  std::optional<double> train_lr;
  std::optional<long long> train_epochs;
  std::optional<long long> train_k;
  std::string train_proposal;
  std::vector<std::string> sweeps;
  auto* train_cmd = app.add_subcommand("train", "train a matrix factorization model");
  add_experiment_args(train_cmd, train_args);
  train_cmd->add_option("--loss", train_loss);
  train_cmd->add_option("--backbone", train_backbone);
  train_cmd->add_option("--dataset", train_dataset, "interaction file; replaces the planted data");
  train_cmd->add_option("--lr", train_lr);
  train_cmd->add_option("--epochs", train_epochs);
  train_cmd->add_option("--k", train_k);
  train_cmd->add_option("--proposal", train_proposal);
  train_cmd->add_option("--sweep", sweeps, "axis=v1,v2,... with axis lr, k, q or seed");

  ExperimentArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "complexity profile over C");
  add_experiment_args(bench_cmd, bench_args);

  ExperimentArgs cal_args;
  auto* cal_cmd = app.add_subcommand("calibration", "top-k calibration and order probes");
  add_experiment_args(cal_cmd, cal_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (map_cmd->parsed()) {
      cmd_map(map_args, out);
    } else if (jac_cmd->parsed()) {
      cmd_jacobian(jac_args, spectral, out);
    } else if (loss_cmd->parsed()) {
      cmd_loss(loss_args, out);
    } else if (bv_cmd->parsed()) {
      cmd_biasvar(resolve_config(biasvar_defaults(), bv_args.config_path,
                                 bv_args.assignments, common_flags(bv_args)),
                  out);
    } else if (train_cmd->parsed()) {
      Json flags = common_flags(train_args);
      if (!train_loss.empty()) flags["loss"] = train_loss;
      if (!train_backbone.empty()) flags["backbone"] = train_backbone;
      if (!train_dataset.empty()) {
        flags["dataset.source"] = "file";
        flags["dataset.path"] = train_dataset;
      }
      if (train_lr) flags["lr"] = *train_lr;
      if (train_epochs) flags["epochs"] = *train_epochs;
      if (train_k) flags["k"] = *train_k;
      if (!train_proposal.empty()) flags["proposal"] = train_proposal;
      for (const auto& s : sweeps) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw UsageError("--sweep expects axis=v1,v2,...");
        const std::string axis = s.substr(0, eq);
        Json values = Json::array();
        std::stringstream ss(s.substr(eq + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
          Json v = Json::parse(item, nullptr, false);
          values.push_back(v.is_discarded() ? Json(item) : v);
        }
        flags["sweep." + axis] = values;
      }
      cmd_train(resolve_config(train_defaults(), train_args.config_path,
                               train_args.assignments, flags),
                out);
    } else if (bench_cmd->parsed()) {
      cmd_bench(resolve_config(bench_defaults(), bench_args.config_path,
                               bench_args.assignments, common_flags(bench_args)),
                out);
    } else if (cal_cmd->parsed()) {
      cmd_calibration(resolve_config(calibration_defaults(), cal_args.config_path,
                                     cal_args.assignments, common_flags(cal_args)),
                      out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace fybench::cli
