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

#ifndef FYBENCH_PROPOSAL_INL_H_
#define FYBENCH_PROPOSAL_INL_H_

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

namespace fybench {

template <typename ScoreFn>
SampleDraw draw_dns(Index num_classes, Index pool, Index top, Stream& rng,
                    ScoreFn&& score_of) {
  if (pool < top || top < 1) throw DomainError("DNS requires pool >= top >= 1");
  std::vector<std::pair<double, Index>> candidates;
  candidates.reserve(static_cast<std::size_t>(pool));
  for (Index i = 0; i < pool; ++i) {
    const Index c = static_cast<Index>(rng.below(static_cast<std::uint64_t>(num_classes)));
    candidates.emplace_back(score_of(c), c);
  }
  std::vector<Index> order(candidates.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return candidates[static_cast<std::size_t>(a)].first >
           candidates[static_cast<std::size_t>(b)].first;
  });
  SampleDraw draw;
  draw.negatives.reserve(static_cast<std::size_t>(top));
  for (Index i = 0; i < top; ++i) {
    draw.negatives.push_back(candidates[static_cast<std::size_t>(order[i])].second);
  }
  return draw;
}

}  // namespace fybench

#endif  // FYBENCH_PROPOSAL_INL_H_
