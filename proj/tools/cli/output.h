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

#ifndef FYBENCH_TOOLS_OUTPUT_H_
#define FYBENCH_TOOLS_OUTPUT_H_

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"

namespace fybench::cli {

// Shortest "%.<digits>g" rendering; "-0" prints as "0".
std::string fmt(double v, int digits = 10);

// RFC-4180 quoting when the field holds a comma, quote or newline.
std::string csv_field(const std::string& s);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& fields);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t width_;
};

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

// Writes <dir>/manifest.json: command, resolved config, config hash, seed and
// versions. Contains nothing time- or host-dependent.
void write_manifest(const std::string& dir, const std::string& command,
                    const nlohmann::json& config);

void ensure_dir(const std::string& dir);

}  // namespace fybench::cli

#endif  // FYBENCH_TOOLS_OUTPUT_H_
