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

#include <benchmark/benchmark.h>

#include "fybench/approx.h"
#include "fybench/fy_losses.h"
#include "fybench/huffman.h"
#include "fybench/proposal.h"
#include "fybench/random.h"

namespace {

fybench::Vector random_scores(fybench::Index c) {
  fybench::Stream rng(23, static_cast<std::uint64_t>(c));
  fybench::Vector s(c);
  for (fybench::Index i = 0; i < c; ++i) s[i] = rng.normal();
  return s;
}

void BM_SoftmaxLoss(benchmark::State& state) {
  const fybench::Index c = state.range(0);
  const fybench::Vector s = random_scores(c);
  const auto y = fybench::LabelVector::one_hot(c, 0);
  for (auto _ : state) benchmark::DoNotOptimize(fybench::softmax_loss(s, y));
  state.SetComplexityN(c);
}
BENCHMARK(BM_SoftmaxLoss)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_SparsemaxLoss(benchmark::State& state) {
  const fybench::Index c = state.range(0);
  const fybench::Vector s = random_scores(c);
  const auto y = fybench::LabelVector::one_hot(c, 0);
  const auto reg = fybench::RegularizerKind::HalfSquaredL2();
  for (auto _ : state) benchmark::DoNotOptimize(fybench::fy_loss(s, y, reg));
  state.SetComplexityN(c);
}
BENCHMARK(BM_SparsemaxLoss)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

// Compact sampled softmax over k + 1 logits; independent of C.
void BM_SampledSoftmaxCompact(benchmark::State& state) {
  const fybench::Vector s = random_scores(state.range(0) + 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fybench::sampled_softmax_compact({s.data(), static_cast<std::size_t>(s.size())}));
  }
}
BENCHMARK(BM_SampledSoftmaxCompact)->Arg(5)->Arg(10)->Arg(50)->Arg(100);

void BM_HsmLoss(benchmark::State& state) {
  const fybench::Index c = state.range(0);
  const fybench::HuffmanTree tree = fybench::build_balanced(c);
  const fybench::Vector nodes = random_scores(c - 1);
  for (auto _ : state) benchmark::DoNotOptimize(fybench::hsm_loss(nodes, c / 2, tree));
  state.SetComplexityN(c);
}
BENCHMARK(BM_HsmLoss)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oLogN);

void BM_AliasSample(benchmark::State& state) {
  const auto q = fybench::ProposalDist::LogUniform(state.range(0));
  fybench::Stream rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(q.sample(rng));
}
BENCHMARK(BM_AliasSample)->Arg(1024)->Arg(65536);

}  // namespace
