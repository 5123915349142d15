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

#ifndef FYBENCH_DATASETS_H_
#define FYBENCH_DATASETS_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fybench/common.h"

namespace fybench {

enum class Split : std::uint32_t { kTrain = 0, kValid = 1, kTest = 2 };

struct Interaction {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  double weight = 1.0;
  Split split = Split::kTrain;
};

struct InteractionSet {
  Index n_users = 0;
  Index n_items = 0;
  std::vector<Interaction> rows;

  Index count(Split split) const;
  // items[u] for every user, ascending, restricted to one split.
  std::vector<std::vector<Index>> items_by_user(Split split) const;
  // Throws DomainError on out-of-range ids or a duplicate (user, item) pair.
  void validate() const;
};

bool operator==(const Interaction& a, const Interaction& b);
bool operator==(const InteractionSet& a, const InteractionSet& b);

// raw id at each dense index.
struct IdMap {
  std::vector<std::string> raw;
};

struct LoadResult {
  InteractionSet data;
  IdMap users;
  IdMap items;
  Index duplicates = 0;        // rows overwritten by a later row (last wins)
  Index below_threshold = 0;   // rows dropped by the rating threshold
  std::string delimiter;
};

// Rows of "user<d>item<d>rating[<d>timestamp]" with <d> one of tab, comma or
// "::" (detected from the first line). A first line whose rating is not a
// number is treated as a header. Ratings >= threshold become positives with
// weight 1; ids are remapped densely in order of first appearance among kept
// rows. Malformed rows raise DomainError naming the line.
LoadResult load_tsv(const std::string& path, double threshold = 3.0);

void save_id_map(const std::string& path, const IdMap& map);
IdMap load_id_map(const std::string& path);

// Little-endian binary cache: "FYBC", version, n_users, n_items, row count,
// then (user, item, split) u32 triples, then f64 weights.
void save_cache(const std::string& path, const InteractionSet& data);
InteractionSet load_cache(const std::string& path);

// Removes users and items with fewer than k interactions until nothing
// changes, then re-densifies ids preserving order. Empty result throws.
struct FilterResult {
  InteractionSet data;
  std::vector<Index> user_origin;  // old id per new user id
  std::vector<Index> item_origin;
};
FilterResult k_core_filter(const InteractionSet& data, Index k);

struct SplitResult {
  InteractionSet data;
  Index train_only_users = 0;  // users with fewer than 3 interactions
};

// Per-user seeded shuffle (or file order when shuffle = false). Users with
// n >= 3 interactions get max(1, floor(r_valid n)) validation and
// max(1, floor(r_test n)) test items; the rest are training items.
SplitResult split_per_user(const InteractionSet& data,
                           std::array<double, 3> ratios, std::uint64_t seed,
                           bool shuffle = true);

struct PlantedData {
  InteractionSet data;  // all rows tagged train
  Matrix user_factors;  // n_users x d
  Matrix item_factors;  // n_items x d
};

// Gaussian factors scaled so a true score u.v has unit variance; each user's
// items are drawn without replacement from softmax(temperature * u V^T) via
// Gumbel top-k.
PlantedData synth_planted(Index n_users, Index n_items, Index d,
                          double temperature, Index interactions_per_user,
                          std::uint64_t seed);

}  // namespace fybench

#endif  // FYBENCH_DATASETS_H_
