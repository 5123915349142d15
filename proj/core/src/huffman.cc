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

#include "fybench/huffman.h"

#include <algorithm>
#include <queue>
#include <tuple>

#include "json.hpp"

namespace fybench {

HuffmanTree::HuffmanTree(std::vector<HuffmanNode> nodes)
    : nodes_(std::move(nodes)) {
  const Index num_classes = num_nodes() + 1;
  if (num_classes < 2) throw DomainError("tree needs at least two classes");
  paths_.assign(static_cast<std::size_t>(num_classes), {});
  std::vector<bool> seen(static_cast<std::size_t>(num_classes), false);
  std::vector<bool> node_seen(nodes_.size(), false);
  // Depth-first walk from the root, carrying the current path.
  struct Frame {
    Index node;
    std::vector<PathStep> prefix;
  };
  std::vector<Frame> stack;
  stack.push_back({root(), {}});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.node < 0 || f.node >= num_nodes() || node_seen[f.node]) {
      throw DomainError("malformed tree");
    }
    node_seen[f.node] = true;
    const HuffmanNode& n = nodes_[f.node];
    for (int side = 0; side < 2; ++side) {
      const HuffmanChild& c = side == 0 ? n.left : n.right;
      std::vector<PathStep> p = f.prefix;
      p.push_back({f.node, side == 0 ? 1 : -1});
      if (c.is_leaf) {
        if (c.index < 0 || c.index >= num_classes || seen[c.index]) {
          throw DomainError("malformed tree leaf");
        }
        seen[c.index] = true;
        paths_[c.index] = std::move(p);
      } else {
        stack.push_back({c.index, std::move(p)});
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw DomainError("tree does not cover every class");
  }
}

Index HuffmanTree::max_depth() const {
  Index d = 0;
  for (const auto& p : paths_) d = std::max<Index>(d, static_cast<Index>(p.size()));
  return d;
}

double HuffmanTree::average_depth() const {
  double total = 0.0;
  for (const auto& p : paths_) total += static_cast<double>(p.size());
  return total / static_cast<double>(paths_.size());
}

namespace {

nlohmann::json child_json(const HuffmanChild& c) {
  return {{"leaf", c.is_leaf}, {"index", c.index}};
}

HuffmanChild child_from(const nlohmann::json& j) {
  return {j.at("leaf").get<bool>(), j.at("index").get<Index>()};
}

}  // namespace

std::string HuffmanTree::to_json() const {
  nlohmann::json doc;
  doc["num_classes"] = num_classes();
  doc["root"] = root();
  nlohmann::json list = nlohmann::json::array();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    list.push_back({{"id", i},
                    {"left", child_json(nodes_[i].left)},
                    {"right", child_json(nodes_[i].right)}});
  }
  doc["nodes"] = std::move(list);
  return doc.dump(2);
}

HuffmanTree HuffmanTree::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("tree document: ") + e.what());
  }
  const auto& list = doc.at("nodes");
  std::vector<HuffmanNode> nodes(list.size());
  for (const auto& entry : list) {
    const auto id = entry.at("id").get<std::size_t>();
    if (id >= nodes.size()) throw DomainError("tree node id out of range");
    nodes[id].left = child_from(entry.at("left"));
    nodes[id].right = child_from(entry.at("right"));
  }
  HuffmanTree tree(std::move(nodes));
  if (doc.contains("num_classes") &&
      doc["num_classes"].get<Index>() != tree.num_classes()) {
    throw DomainError("tree class count mismatch");
  }
  return tree;
}

HuffmanTree build_huffman(const Vector& freq, std::uint64_t /*seed*/) {
  const Index c = freq.size();
  if (c < 2) throw DomainError("Huffman tree needs at least two classes");
  double total = 0.0;
  for (Index j = 0; j < c; ++j) {
    if (!(freq[j] >= 0.0) || !std::isfinite(freq[j])) {
      throw DomainError("frequencies must be finite and nonnegative");
    }
    total += freq[j];
  }
  if (!(total > 0.0)) throw DomainError("all frequencies are zero");

  // (weight, smallest class inside, child)
  using Item = std::tuple<double, Index, HuffmanChild>;
  auto greater = [](const Item& a, const Item& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::get<1>(a) > std::get<1>(b);
  };
  std::priority_queue<Item, std::vector<Item>, decltype(greater)> heap(greater);
  for (Index j = 0; j < c; ++j) heap.emplace(freq[j], j, HuffmanChild{true, j});

  std::vector<HuffmanNode> nodes;
  nodes.reserve(static_cast<std::size_t>(c - 1));
  while (heap.size() > 1) {
    const Item a = heap.top();
    heap.pop();
    const Item b = heap.top();
    heap.pop();
    nodes.push_back({std::get<2>(a), std::get<2>(b)});
    heap.emplace(std::get<0>(a) + std::get<0>(b),
                 std::min(std::get<1>(a), std::get<1>(b)),
                 HuffmanChild{false, static_cast<Index>(nodes.size() - 1)});
  }
  return HuffmanTree(std::move(nodes));
}

HuffmanTree build_balanced(Index num_classes) {
  return build_huffman(Vector::Ones(num_classes));
}

LossEval hsm_loss(const Vector& node_logits, Index y, const HuffmanTree& tree) {
  if (node_logits.size() != tree.num_nodes()) {
    throw UsageError("need one logit per internal node");
  }
  check_class_index(y, tree.num_classes());
  LossEval out;
  out.gradient = Vector::Zero(node_logits.size());
  for (const PathStep& step : tree.path(y)) {
    const double z = step.sign * node_logits[step.node];
    out.value += softplus(-z);
    out.gradient[step.node] = -step.sign * sigmoid(-z);
  }
  return out;
}

Vector hsm_probabilities(const Vector& node_logits, const HuffmanTree& tree) {
  if (node_logits.size() != tree.num_nodes()) {
    throw UsageError("need one logit per internal node");
  }
  Vector p(tree.num_classes());
  for (Index j = 0; j < tree.num_classes(); ++j) {
    double log_p = 0.0;
    for (const PathStep& step : tree.path(j)) {
      log_p -= softplus(-step.sign * node_logits[step.node]);
    }
    p[j] = std::exp(log_p);
  }
  return p;
}

Vector hsm_implicit_scores(const Vector& node_logits, const HuffmanTree& tree) {
  if (node_logits.size() != tree.num_nodes()) {
    throw UsageError("need one logit per internal node");
  }
  Vector s = Vector::Zero(tree.num_classes());
  for (Index j = 0; j < tree.num_classes(); ++j) {
    for (const PathStep& step : tree.path(j)) {
      s[j] += 0.5 * step.sign * node_logits[step.node];
    }
  }
  return s;
}

}  // namespace fybench
