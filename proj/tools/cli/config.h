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

#ifndef FYBENCH_TOOLS_CONFIG_H_
#define FYBENCH_TOOLS_CONFIG_H_

#include <string>
#include <vector>

#include "json.hpp"

namespace fybench::cli {

using Json = nlohmann::json;

// Overlays `patch` on `base`. Every key in the patch must already exist in
// base with a compatible type; otherwise ConfigError names the dotted path.
// Integers are accepted where base holds a float, not the reverse.
void merge_checked(Json& base, const Json& patch, const std::string& where = "");

// Parses a JSON config document. Syntax errors raise ConfigError.
Json read_config_file(const std::string& path);

// Applies "dotted.key=value". The value is parsed as JSON and falls back to a
// plain string, so "lr=0.1", "k=[5,10]" and "loss=ssm" all work.
void apply_assignment(Json& config, const std::string& assignment);

// Resolves defaults < config file < --set assignments < dedicated flags.
// `flags` holds the dedicated flag values already in dotted form.
Json resolve_config(const Json& defaults, const std::string& config_path,
                    const std::vector<std::string>& assignments,
                    const Json& flags);

// Typed accessors raising ConfigError with the dotted key on mismatch.
double get_double(const Json& c, const std::string& key);
long long get_int(const Json& c, const std::string& key);
std::string get_string(const Json& c, const std::string& key);
bool get_bool(const Json& c, const std::string& key);
std::vector<double> get_doubles(const Json& c, const std::string& key);
std::vector<long long> get_ints(const Json& c, const std::string& key);
std::vector<std::string> get_strings(const Json& c, const std::string& key);

}  // namespace fybench::cli

#endif  // FYBENCH_TOOLS_CONFIG_H_
