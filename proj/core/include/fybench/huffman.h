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

#ifndef FYBENCH_HUFFMAN_H_
#define FYBENCH_HUFFMAN_H_

#include <string>
#include <vector>

#include "fybench/common.h"
#include "fybench/fy_losses.h"

namespace fybench {

struct HuffmanChild {
  bool is_leaf = false;
  Index index = 0;  // class id for leaves, node id otherwise
};

struct HuffmanNode {
  HuffmanChild left;   // branch sign +1
  HuffmanChild right;  // branch sign -1
};

struct PathStep {
  Index node = 0;
  int sign = 1;
};

// Binary code tree over C >= 2 classes with C - 1 internal nodes. Nodes are
// numbered in merge order, so the root is node C - 2.
class HuffmanTree {
 public:
  HuffmanTree() = default;
  explicit HuffmanTree(std::vector<HuffmanNode> nodes);

  Index num_classes() const { return static_cast<Index>(paths_.size()); }
  Index num_nodes() const { return static_cast<Index>(nodes_.size()); }
  Index root() const { return num_nodes() - 1; }
  const std::vector<HuffmanNode>& nodes() const { return nodes_; }

  // Root-to-leaf steps for class j.
  const std::vector<PathStep>& path(Index j) const { return paths_[j]; }
  Index depth(Index j) const { return static_cast<Index>(paths_[j].size()); }
  Index max_depth() const;
  double average_depth() const;

  std::string to_json() const;
  static HuffmanTree from_json(const std::string& text);

 private:
  std::vector<HuffmanNode> nodes_;
  std::vector<std::vector<PathStep>> paths_;
};

// Repeatedly merges the two lightest subtrees. Ties go to the smaller
// (frequency, smallest contained class). The first subtree popped becomes the
// left child. `seed` is accepted for interface symmetry; the result does not
// depend on it.
HuffmanTree build_huffman(const Vector& freq, std::uint64_t seed = 0);

// Balanced tree (uniform frequencies).
HuffmanTree build_balanced(Index num_classes);

// -sum_{u in path(y)} log sig(b_u s_u); gradient over the C - 1 node logits.
LossEval hsm_loss(const Vector& node_logits, Index y, const HuffmanTree& tree);

// P_HSM(j) for every class.
Vector hsm_probabilities(const Vector& node_logits, const HuffmanTree& tree);

// s_j = sum_{u in path(j)} b_u s_u / 2. With these,
//   log P_HSM(j) = s_j - sum_{u in path(j)} log(2 cosh(s_u / 2)).
Vector hsm_implicit_scores(const Vector& node_logits, const HuffmanTree& tree);

}  // namespace fybench

#endif  // FYBENCH_HUFFMAN_H_
