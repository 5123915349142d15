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

#include "fybench/checkpoint.h"

#include <cstring>
#include <fstream>

#include "binary_io.h"
#include "json.hpp"

namespace fybench {

namespace {

constexpr char kMagic[4] = {'F', 'Y', 'C', 'K'};

void write_matrix(std::ostream& out, const FactorMatrix& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) io::put<double>(out, m(r, c));
  }
}

FactorMatrix read_matrix(std::istream& in, Index rows, Index cols) {
  FactorMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = io::get<double>(in);
  }
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const MFModel& model,
                     std::uint64_t seed, const std::string& loss) {
  nlohmann::json header;
  header["dtype"] = "f64le";
  header["dim"] = model.dim();
  header["n_users"] = model.user_factors.rows();
  header["n_items"] = model.item_factors.rows();
  header["n_nodes"] = model.node_factors.rows();
  header["seed"] = seed;
  header["loss"] = loss;
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path);
  out.write(kMagic, 4);
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  write_matrix(out, model.user_factors);
  write_matrix(out, model.item_factors);
  write_matrix(out, model.node_factors);
  if (!out) throw DomainError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw DomainError(path + " is not a checkpoint");
  }
  const auto length = io::get<std::uint32_t>(in);
  std::string text(length, '\0');
  if (!in.read(text.data(), length)) throw DomainError("truncated checkpoint");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("checkpoint header: ") + e.what());
  }
  if (header.at("dtype") != "f64le") throw DomainError("unsupported dtype");
  Checkpoint ck;
  const auto d = header.at("dim").get<Index>();
  ck.model.user_factors = read_matrix(in, header.at("n_users").get<Index>(), d);
  ck.model.item_factors = read_matrix(in, header.at("n_items").get<Index>(), d);
  ck.model.node_factors = read_matrix(in, header.at("n_nodes").get<Index>(), d);
  ck.seed = header.at("seed").get<std::uint64_t>();
  ck.loss = header.at("loss").get<std::string>();
  return ck;
}

}  // namespace fybench
