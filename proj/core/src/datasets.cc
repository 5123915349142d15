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

#include "fybench/datasets.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_map>
#include <utility>

#include "binary_io.h"
#include "fybench/random.h"

namespace fybench {

Index InteractionSet::count(Split split) const {
  return std::count_if(rows.begin(), rows.end(),
                       [&](const Interaction& r) { return r.split == split; });
}

std::vector<std::vector<Index>> InteractionSet::items_by_user(Split split) const {
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(n_users));
  for (const Interaction& r : rows) {
    if (r.split == split) out[r.user].push_back(r.item);
  }
  for (auto& items : out) std::sort(items.begin(), items.end());
  return out;
}

void InteractionSet::validate() const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(rows.size());
  for (const Interaction& r : rows) {
    if (r.user >= n_users || r.item >= n_items) {
      throw DomainError("interaction id out of range");
    }
    pairs.emplace_back(r.user, r.item);
  }
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) {
    throw DomainError("duplicate (user, item) pair");
  }
}

bool operator==(const Interaction& a, const Interaction& b) {
  return a.user == b.user && a.item == b.item && a.weight == b.weight &&
         a.split == b.split;
}

bool operator==(const InteractionSet& a, const InteractionSet& b) {
  return a.n_users == b.n_users && a.n_items == b.n_items && a.rows == b.rows;
}

namespace {

std::vector<std::string> split_fields(const std::string& line,
                                      const std::string& delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + delim.size();
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

std::string detect_delimiter(const std::string& line) {
  if (line.find("::") != std::string::npos) return "::";
  if (line.find('\t') != std::string::npos) return "\t";
  if (line.find(',') != std::string::npos) return ",";
  throw DomainError("line 1: no tab, comma or '::' delimiter");
}

}  // namespace

LoadResult load_tsv(const std::string& path, double threshold) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  LoadResult out;

  struct Row {
    std::string user;
    std::string item;
    double rating;
  };
  std::vector<Row> rows;
  std::map<std::pair<std::string, std::string>, std::size_t> seen;

  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (out.delimiter.empty()) out.delimiter = detect_delimiter(line);
    const auto fields = split_fields(line, out.delimiter);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (fields.size() < 3 || fields.size() > 4) {
      throw DomainError(where + "expected 3 or 4 fields");
    }
    const std::string user = trim(fields[0]);
    const std::string item = trim(fields[1]);
    double rating = 0.0;
    if (!parse_double(trim(fields[2]), rating)) {
      if (rows.empty() && seen.empty() && line_no == 1) continue;  // header
      throw DomainError(where + "rating is not a number");
    }
    if (user.empty() || item.empty()) throw DomainError(where + "empty id");
    const auto key = std::make_pair(user, item);
    const auto it = seen.find(key);
    if (it != seen.end()) {
      rows[it->second].rating = rating;
      ++out.duplicates;
    } else {
      seen.emplace(key, rows.size());
      rows.push_back({user, item, rating});
    }
  }

  std::unordered_map<std::string, std::uint32_t> user_ids;
  std::unordered_map<std::string, std::uint32_t> item_ids;
  for (const Row& r : rows) {
    if (r.rating < threshold) {
      ++out.below_threshold;
      continue;
    }
    auto [u, new_u] = user_ids.emplace(r.user, static_cast<std::uint32_t>(user_ids.size()));
    if (new_u) out.users.raw.push_back(r.user);
    auto [i, new_i] = item_ids.emplace(r.item, static_cast<std::uint32_t>(item_ids.size()));
    if (new_i) out.items.raw.push_back(r.item);
    out.data.rows.push_back({u->second, i->second, 1.0, Split::kTrain});
  }
  if (out.data.rows.empty()) throw DomainError(path + ": no interactions kept");
  out.data.n_users = static_cast<Index>(out.users.raw.size());
  out.data.n_items = static_cast<Index>(out.items.raw.size());
  return out;
}

void save_id_map(const std::string& path, const IdMap& map) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  for (std::size_t i = 0; i < map.raw.size(); ++i) {
    out << i << '\t' << map.raw[i] << '\n';
  }
}

IdMap load_id_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  IdMap map;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tab = line.find('\t');
    if (tab == std::string::npos ||
        line.substr(0, tab) != std::to_string(map.raw.size())) {
      throw DomainError("id map line " + std::to_string(line_no) + " malformed");
    }
    map.raw.push_back(line.substr(tab + 1));
  }
  return map;
}

namespace {

constexpr char kCacheMagic[4] = {'F', 'Y', 'B', 'C'};
constexpr std::uint32_t kCacheVersion = 1;

using io::get;
using io::put;

}  // namespace

void save_cache(const std::string& path, const InteractionSet& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path);
  out.write(kCacheMagic, 4);
  put<std::uint32_t>(out, kCacheVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(data.n_users));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(data.n_items));
  put<std::uint64_t>(out, data.rows.size());
  for (const Interaction& r : data.rows) {
    put<std::uint32_t>(out, r.user);
    put<std::uint32_t>(out, r.item);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(r.split));
  }
  for (const Interaction& r : data.rows) put<double>(out, r.weight);
  if (!out) throw DomainError("write failed: " + path);
}

InteractionSet load_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCacheMagic, 4) != 0) {
    throw DomainError(path + " is not a cache file");
  }
  if (get<std::uint32_t>(in) != kCacheVersion) {
    throw DomainError(path + ": unsupported cache version");
  }
  InteractionSet data;
  data.n_users = get<std::uint32_t>(in);
  data.n_items = get<std::uint32_t>(in);
  const auto n = get<std::uint64_t>(in);
  data.rows.resize(n);
  for (auto& r : data.rows) {
    r.user = get<std::uint32_t>(in);
    r.item = get<std::uint32_t>(in);
    const auto split = get<std::uint32_t>(in);
    if (split > 2) throw DomainError(path + ": bad split tag");
    r.split = static_cast<Split>(split);
  }
  for (auto& r : data.rows) r.weight = get<double>(in);
  data.validate();
  return data;
}

FilterResult k_core_filter(const InteractionSet& data, Index k) {
  if (k < 1) throw DomainError("k must be at least 1");
  std::vector<bool> alive(data.rows.size(), true);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Index> user_deg(static_cast<std::size_t>(data.n_users), 0);
    std::vector<Index> item_deg(static_cast<std::size_t>(data.n_items), 0);
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
      if (!alive[i]) continue;
      ++user_deg[data.rows[i].user];
      ++item_deg[data.rows[i].item];
    }
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
      if (alive[i] && (user_deg[data.rows[i].user] < k ||
                       item_deg[data.rows[i].item] < k)) {
        alive[i] = false;
        changed = true;
      }
    }
  }

  FilterResult out;
  std::vector<Index> user_map(static_cast<std::size_t>(data.n_users), -1);
  std::vector<Index> item_map(static_cast<std::size_t>(data.n_items), -1);
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    if (!alive[i]) continue;
    user_map[data.rows[i].user] = 0;
    item_map[data.rows[i].item] = 0;
  }
  for (Index u = 0; u < data.n_users; ++u) {
    if (user_map[u] == 0) {
      user_map[u] = static_cast<Index>(out.user_origin.size());
      out.user_origin.push_back(u);
    }
  }
  for (Index j = 0; j < data.n_items; ++j) {
    if (item_map[j] == 0) {
      item_map[j] = static_cast<Index>(out.item_origin.size());
      out.item_origin.push_back(j);
    }
  }
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    if (!alive[i]) continue;
    Interaction r = data.rows[i];
    r.user = static_cast<std::uint32_t>(user_map[r.user]);
    r.item = static_cast<std::uint32_t>(item_map[r.item]);
    out.data.rows.push_back(r);
  }
  if (out.data.rows.empty()) throw DomainError("k-core filter removed everything");
  out.data.n_users = static_cast<Index>(out.user_origin.size());
  out.data.n_items = static_cast<Index>(out.item_origin.size());
  return out;
}

SplitResult split_per_user(const InteractionSet& data,
                           std::array<double, 3> ratios, std::uint64_t seed,
                           bool shuffle) {
  for (double r : ratios) {
    if (!(r >= 0.0)) throw DomainError("split ratios must be nonnegative");
  }
  const double total = ratios[0] + ratios[1] + ratios[2];
  if (!(total > 0.0)) throw DomainError("split ratios sum to zero");
  const double r_valid = ratios[1] / total;
  const double r_test = ratios[2] / total;

  std::vector<std::vector<std::size_t>> by_user(static_cast<std::size_t>(data.n_users));
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    by_user[data.rows[i].user].push_back(i);
  }
  SplitResult out;
  out.data = data;
  for (Index u = 0; u < data.n_users; ++u) {
    auto& idx = by_user[u];
    const auto n = static_cast<Index>(idx.size());
    for (std::size_t i : idx) out.data.rows[i].split = Split::kTrain;
    if (n == 0) continue;
    if (n < 3) {
      ++out.train_only_users;
      continue;
    }
    if (shuffle) {
      Stream rng(seed, static_cast<std::uint64_t>(u));
      for (Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
        std::swap(idx[i], idx[j]);
      }
    }
    const auto dn = static_cast<double>(n);
    const Index n_valid = r_valid > 0.0
        ? std::max<Index>(1, static_cast<Index>(std::floor(r_valid * dn))) : 0;
    const Index n_test = r_test > 0.0
        ? std::max<Index>(1, static_cast<Index>(std::floor(r_test * dn))) : 0;
    // The last positions of the shuffled order go to test, then validation.
    for (Index i = 0; i < n_test; ++i) out.data.rows[idx[n - 1 - i]].split = Split::kTest;
    for (Index i = 0; i < n_valid; ++i) {
      out.data.rows[idx[n - 1 - n_test - i]].split = Split::kValid;
    }
  }
  return out;
}

PlantedData synth_planted(Index n_users, Index n_items, Index d,
                          double temperature, Index interactions_per_user,
                          std::uint64_t seed) {
  if (n_users < 1 || n_items < 2 || d < 1 || interactions_per_user < 1 ||
      !(temperature >= 0.0)) {
    throw DomainError("synthetic data parameters must be positive");
  }
  if (interactions_per_user >= n_items) {
    throw DomainError("interactions_per_user must be below n_items");
  }
  PlantedData out;
  const double scale = 1.0 / std::pow(static_cast<double>(d), 0.25);
  Stream factors(seed, 0);
  out.user_factors.resize(n_users, d);
  out.item_factors.resize(n_items, d);
  for (Index u = 0; u < n_users; ++u) {
    for (Index f = 0; f < d; ++f) out.user_factors(u, f) = scale * factors.normal();
  }
  for (Index j = 0; j < n_items; ++j) {
    for (Index f = 0; f < d; ++f) out.item_factors(j, f) = scale * factors.normal();
  }

  out.data.n_users = n_users;
  out.data.n_items = n_items;
  out.data.rows.reserve(static_cast<std::size_t>(n_users * interactions_per_user));
  std::vector<std::pair<double, Index>> keys(static_cast<std::size_t>(n_items));
  for (Index u = 0; u < n_users; ++u) {
    Stream rng(seed, static_cast<std::uint64_t>(u) + 1);
    const Vector scores = out.item_factors * out.user_factors.row(u).transpose();
    for (Index j = 0; j < n_items; ++j) {
      keys[j] = {temperature * scores[j] + rng.gumbel(), j};
    }
    std::partial_sort(keys.begin(), keys.begin() + interactions_per_user, keys.end(),
                      [](const auto& a, const auto& b) {
                        return a.first != b.first ? a.first > b.first : a.second < b.second;
                      });
    std::vector<Index> chosen;
    for (Index i = 0; i < interactions_per_user; ++i) chosen.push_back(keys[i].second);
    std::sort(chosen.begin(), chosen.end());
    for (Index j : chosen) {
      out.data.rows.push_back({static_cast<std::uint32_t>(u),
                               static_cast<std::uint32_t>(j), 1.0, Split::kTrain});
    }
  }
  return out;
}

}  // namespace fybench
