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

#include "output.h"

#include <cstdio>
#include <filesystem>

#include "fybench/common.h"

namespace fybench::cli {

std::string fmt(double v, int digits) {
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary), width_(header.size()) {
  if (!out_) throw DomainError("cannot write " + path);
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw DomainError("CSV row width mismatch in " + path_);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_field(fields[i]);
  }
  out_ << '\n';
  out_.flush();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DomainError("cannot create " + dir + ": " + ec.message());
}

void write_manifest(const std::string& dir, const std::string& command,
                    const nlohmann::json& config) {
  ensure_dir(dir);
  // The output location does not change results, so it stays out of the hash.
  nlohmann::json hashed = config;
  hashed.erase("out");
  const std::string canonical = hashed.dump();
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical)));
  nlohmann::json m;
  m["command"] = command;
  m["config"] = hashed;
  m["config_hash"] = hash;
  m["seed"] = hashed.contains("seed") ? hashed["seed"] : nlohmann::json(nullptr);
  m["fybench_version"] = FYBENCH_VERSION;
  m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                       std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  std::ofstream out(dir + "/manifest.json", std::ios::binary);
  if (!out) throw DomainError("cannot write manifest in " + dir);
  out << m.dump(2) << '\n';
}

}  // namespace fybench::cli
