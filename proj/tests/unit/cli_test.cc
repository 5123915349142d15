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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"

namespace fybench::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fybench");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Outcome o;
  o.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string first_line(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

std::string golden(const std::string& name) { return slurp(fs::path(FYBENCH_GOLDEN_DIR) / name); }

std::string fresh_dir(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("fybench_cli_" + name);
  fs::remove_all(dir);
  return dir.string();
}

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> v;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
  return v;
}

TEST(CliMap, SoftmaxUniform) {
  const Outcome o = run_cli({"map", "--mapping", "softmax", "--scores", "0,0,0"});
  EXPECT_EQ(o.code, kExitOk);
  EXPECT_EQ(o.out, "0.333333,0.333333,0.333333\n");
}

TEST(CliMap, EntmaxAlphaTwoEqualsSparsemax) {
  const Outcome a = run_cli({"map", "--mapping", "entmax", "--alpha", "2", "--scores", "1,0"});
  const Outcome b = run_cli({"map", "--mapping", "sparsemax", "--scores", "1,0"});
  EXPECT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(b.out, "1,0\n");
}

TEST(CliMap, ScoresFileGivesOneLinePerVector) {
  const std::string path = ::testing::TempDir() + "fybench_scores.txt";
  std::ofstream(path) << "0,0\n1,0\n";
  const Outcome o = run_cli({"map", "--mapping", "sparsemax", "--scores-file", path});
  EXPECT_EQ(o.out, "0.5,0.5\n1,0\n");
}

TEST(CliJacobian, SoftmaxSpectralNorm) {
  const Outcome o = run_cli({"jacobian", "--mapping", "softmax", "--scores", "0,0", "--spectral"});
  ASSERT_EQ(o.code, kExitOk);
  const auto pos = o.out.find("spectral_norm,");
  ASSERT_NE(pos, std::string::npos);
  const double norm = std::stod(o.out.substr(pos + 14));
  EXPECT_LE(norm, 0.5 + 1e-9);
  EXPECT_EQ(o.out, golden("jacobian_softmax.txt"));
}

TEST(CliLoss, SoftmaxValueAndGradient) {
  const Outcome o = run_cli({"loss", "--loss", "softmax", "--scores", "0,0,0", "--labels", "1"});
  ASSERT_EQ(o.code, kExitOk);
  std::stringstream ss(o.out);
  std::string value;
  std::string gradient;
  std::getline(ss, value);
  std::getline(ss, gradient);
  EXPECT_NEAR(std::stod(value.substr(6)), std::log(3.0), 1e-6);
  const std::vector<double> g = parse_row(gradient.substr(9));
  ASSERT_EQ(g.size(), 3u);
  EXPECT_NEAR(g[1], 1.0 / 3.0 - 1.0, 1e-6);
}

TEST(CliExitCodes, UsageAndRuntimeErrors) {
  EXPECT_EQ(run_cli({"map", "--mapping", "hardmax", "--scores", "0,1"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"map", "--mapping", "softmax"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"map", "--mapping", "softmax", "--scores", "0,nan"}).code, kExitRuntime);
  EXPECT_EQ(run_cli({"map", "--mapping", "entmax", "--alpha", "3", "--scores", "0,1"}).code,
            kExitRuntime);
  EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
}

TEST(CliConfig, UnknownKeysAndTypesRejected) {
  const std::string out = fresh_dir("cfg");
  EXPECT_EQ(run_cli({"biasvar", "--set", "bogus=1", "--out", out}).code, kExitUsage);
  EXPECT_EQ(run_cli({"biasvar", "--set", "trials=\"many\"", "--out", out}).code, kExitUsage);
  const std::string path = ::testing::TempDir() + "fybench_bad.json";
  std::ofstream(path) << "{\"dataset\": {\"colour\": 1}}";
  EXPECT_EQ(run_cli({"train", "--config", path, "--out", out}).code, kExitUsage);
  std::ofstream(path) << "{not json";
  EXPECT_EQ(run_cli({"train", "--config", path, "--out", out}).code, kExitUsage);
}

TEST(CliTrain, HsmRequiresMfBackbone) {
  const Outcome o = run_cli({"train", "--loss", "hsm", "--backbone", "sasrec", "--out",
                             fresh_dir("hsm")});
  EXPECT_EQ(o.code, kExitUsage);
  EXPECT_NE(o.err.find("hsm trains only with the mf backbone"), std::string::npos);
  EXPECT_EQ(run_cli({"train", "--set", "solver=\"als\"", "--out", fresh_dir("als")}).code,
            kExitUsage);
}

const std::vector<std::string> kSmallTrain = {
    "--set", "dataset.users=40", "--set", "dataset.items=30", "--set", "dataset.per_user=6",
    "--set", "dim=4", "--epochs", "2"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

TEST(CliTrain, HeadersManifestAndDeterminism) {
  const std::string a = fresh_dir("train_a");
  const std::string b = fresh_dir("train_b");
  ASSERT_EQ(run_cli(with({"train", "--out", a}, kSmallTrain)).code, kExitOk);
  ASSERT_EQ(run_cli(with({"train", "--out", b}, kSmallTrain)).code, kExitOk);
  EXPECT_EQ(first_line(fs::path(a) / "train.csv"), first_line(fs::path(FYBENCH_GOLDEN_DIR) / "train_header.csv"));
  EXPECT_EQ(first_line(fs::path(a) / "train_timing.csv"), "epoch,wall_time_s,cumulative_time_s");
  EXPECT_EQ(first_line(fs::path(a) / "summary.csv"), first_line(fs::path(FYBENCH_GOLDEN_DIR) / "summary_header.csv"));
  for (const char* name : {"train.csv", "summary.csv", "manifest.json", "train.ckpt"}) {
    EXPECT_EQ(slurp(fs::path(a) / name), slurp(fs::path(b) / name)) << name;
  }
  const auto manifest = nlohmann::json::parse(slurp(fs::path(a) / "manifest.json"));
  EXPECT_EQ(manifest["command"], "train");
  EXPECT_EQ(manifest["seed"], 1);
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 16u);
  EXPECT_EQ(manifest["config"]["epochs"], 2);
}

TEST(CliTrain, SweepWritesOneFilePerPoint) {
  const std::string out = fresh_dir("sweep");
  ASSERT_EQ(run_cli(with({"train", "--loss", "ssm", "--sweep", "k=2,4", "--sweep", "seed=1,2",
                          "--out", out},
                         kSmallTrain))
                .code,
            kExitOk);
  for (const char* tag : {"k2_seed1", "k2_seed2", "k4_seed1", "k4_seed2"}) {
    EXPECT_TRUE(fs::exists(fs::path(out) / (std::string(tag) + ".csv"))) << tag;
  }
  EXPECT_EQ(run_cli({"train", "--sweep", "momentum=1,2", "--out", out}).code, kExitUsage);
}

TEST(CliTrain, DivergenceEndsWithDivergedRow) {
  const std::string out = fresh_dir("diverge");
  const Outcome o = run_cli(with({"train", "--lr", "1e7", "--out", out}, kSmallTrain));
  EXPECT_EQ(o.code, kExitOk);
  const std::string csv = slurp(fs::path(out) / "train.csv");
  EXPECT_NE(csv.find("DIVERGED"), std::string::npos);
}

TEST(CliTrain, AlsWritesObjectiveTrace) {
  const std::string out = fresh_dir("als_ok");
  ASSERT_EQ(run_cli(with({"train", "--loss", "rg", "--set", "solver=\"als\"", "--set", "l2=1",
                          "--out", out},
                         kSmallTrain))
                .code,
            kExitOk);
  EXPECT_EQ(first_line(fs::path(out) / "train_objective.csv"), "half_sweep,objective");
}

TEST(CliTrain, ReadsInteractionFile) {
  const std::string data = ::testing::TempDir() + "fybench_ratings.tsv";
  {
    std::ofstream f(data);
    for (int u = 0; u < 12; ++u) {
      for (int i = 0; i < 8; ++i) {
        if ((u + i) % 3 != 0) f << "u" << u << "\ti" << i << "\t5\n";
      }
    }
  }
  const std::string out = fresh_dir("file");
  EXPECT_EQ(run_cli({"train", "--dataset", data, "--epochs", "1", "--set", "dim=2", "--set",
                     "cutoffs=[3]", "--out", out})
                .code,
            kExitOk);
  EXPECT_EQ(run_cli({"train", "--dataset", data + ".missing", "--out", out}).code, kExitRuntime);
}

TEST(CliBiasvar, GoldenOutput) {
  const std::string out = fresh_dir("biasvar");
  const std::vector<std::string> args = {
      "biasvar", "--set", "schemes=[\"ssm\",\"nce\",\"hsm\",\"rg\"]", "--set", "k=[5,50]",
      "--set", "trials=400", "--set", "profiles=1", "--set", "classes=8", "--out", out};
  ASSERT_EQ(run_cli(args).code, kExitOk);
  EXPECT_EQ(slurp(fs::path(out) / "biasvar.csv"), golden("biasvar_small.csv"));
}

TEST(CliBiasvar, DefaultGridShape) {
  const std::string out = fresh_dir("biasvar_default");
  ASSERT_EQ(run_cli({"biasvar", "--set", "trials=200", "--out", out}).code, kExitOk);
  std::ifstream in(fs::path(out) / "biasvar.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, first_line(fs::path(FYBENCH_GOLDEN_DIR) / "biasvar_small.csv"));
  // columns: scheme,k,proposal,profile,classes,true_class,chi2,bias_asym,bias_curv,variance,...
  int rows = 0;
  std::map<std::string, double> last_variance;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells[0] != "ssm") continue;
    const std::string key = cells[2] + "/" + cells[3];
    const double variance = std::stod(cells[9]);
    if (last_variance.count(key)) EXPECT_LT(variance, last_variance[key]);
    last_variance[key] = variance;
  }
  EXPECT_GE(rows, 16);
}

TEST(CliBench, HeadersAndExactSlopes) {
  const std::string out = fresh_dir("bench");
  ASSERT_EQ(run_cli({"bench", "--set", "classes=[64,128,256]", "--set", "examples=200",
                     "--set", "repeats=1", "--out", out})
                .code,
            kExitOk);
  std::ifstream in(fs::path(out) / "bench.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "loss,classes,score_evals,evals_slope");
  while (std::getline(in, line)) {
    const std::string slope = line.substr(line.rfind(',') + 1);
    EXPECT_EQ(slope, line.rfind("softmax", 0) == 0 ? "1" : "0") << line;
  }
  EXPECT_EQ(first_line(fs::path(out) / "bench_timing.csv"), "loss,classes,median_time_s,time_slope");
}

TEST(CliCalibration, ReportAndGradientDump) {
  const std::string out = fresh_dir("calibration");
  ASSERT_EQ(run_cli({"calibration", "--set", "trials=200", "--set", "order_trials=2000", "--out",
                     out})
                .code,
            kExitOk);
  const auto report = nlohmann::json::parse(slurp(fs::path(out) / "calibration.json"));
  EXPECT_EQ(report["total_violations"], 0);
  for (const auto& probe : report["order_probes"]) {
    const bool sparse = probe["mapping"] != "softmax";
    EXPECT_EQ(probe["verdict"] == "WOP-witnessed", sparse) << probe.dump();
  }
  const std::string sparse = slurp(fs::path(out) / "gradients_sparsemax.csv");
  const std::string dense = slurp(fs::path(out) / "gradients_softmax.csv");
  EXPECT_EQ(first_line(fs::path(out) / "gradients_softmax.csv"), "example,true_class,g0,g1,g2,g3,g4,g5");
  EXPECT_NE(sparse.find(",0,"), std::string::npos);
  // Softmax rows carry no exact zero entries.
  std::stringstream ss(dense);
  std::string line;
  std::getline(ss, line);
  while (std::getline(ss, line)) {
    const std::string grads = line.substr(line.find(',', line.find(',') + 1));
    EXPECT_EQ((grads + ",").find(",0,"), std::string::npos) << line;
  }
}

}  // namespace
}  // namespace fybench::cli
