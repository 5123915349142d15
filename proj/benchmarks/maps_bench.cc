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

#include "fybench/random.h"
#include "fybench/simplex_maps.h"

namespace {

fybench::Vector random_scores(fybench::Index c) {
  fybench::Stream rng(17, static_cast<std::uint64_t>(c));
  fybench::Vector s(c);
  for (fybench::Index i = 0; i < c; ++i) s[i] = 2.0 * rng.normal();
  return s;
}

void BM_Softmax(benchmark::State& state) {
  const fybench::Vector s = random_scores(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fybench::softmax_map(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Softmax)->RangeMultiplier(4)->Range(16, 16384)->Complexity();

void BM_Sparsemax(benchmark::State& state) {
  const fybench::Vector s = random_scores(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fybench::sparsemax_map(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Sparsemax)->RangeMultiplier(4)->Range(16, 16384)->Complexity();

void BM_Entmax15(benchmark::State& state) {
  const fybench::Vector s = random_scores(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fybench::entmax_map(s, 1.5));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Entmax15)->RangeMultiplier(4)->Range(16, 16384)->Complexity();

void BM_Rankmax(benchmark::State& state) {
  const fybench::Vector s = random_scores(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fybench::rankmax_map(s, 0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Rankmax)->RangeMultiplier(4)->Range(16, 16384)->Complexity();

void BM_SoftmaxSpectralNorm(benchmark::State& state) {
  const fybench::Vector s = random_scores(state.range(0));
  const auto j = fybench::jacobian(s, fybench::MappingKind::Softmax());
  for (auto _ : state) benchmark::DoNotOptimize(fybench::spectral_norm(j.entries));
}
BENCHMARK(BM_SoftmaxSpectralNorm)->Arg(16)->Arg(64);

}  // namespace
