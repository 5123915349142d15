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

#include "config.h"

#include <fstream>
#include <sstream>

#include "fybench/common.h"

namespace fybench::cli {

namespace {

std::string join_key(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

bool compatible(const Json& base, const Json& value) {
  if (base.is_boolean()) return value.is_boolean();
  if (base.is_number_float()) return value.is_number();
  if (base.is_number_integer()) return value.is_number_integer();
  if (base.is_string()) return value.is_string();
  if (base.is_object()) return value.is_object();
  if (base.is_array()) {
    if (!value.is_array()) return false;
    if (base.empty()) return true;
    for (const auto& v : value) {
      if (!compatible(base.front(), v)) return false;
    }
    return true;
  }
  return false;
}

const Json& lookup(const Json& c, const std::string& key) {
  const Json* node = &c;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) {
      throw ConfigError("missing config key '" + key + "'");
    }
    node = &(*node)[part];
  }
  return *node;
}

[[noreturn]] void type_error(const std::string& key, const char* want) {
  throw ConfigError("config key '" + key + "' must be " + want);
}

}  // namespace

void merge_checked(Json& base, const Json& patch, const std::string& where) {
  if (!patch.is_object()) {
    throw ConfigError("config " + (where.empty() ? std::string("document") : "'" + where + "'") +
                      " must be an object");
  }
  for (const auto& [key, value] : patch.items()) {
    const std::string path = join_key(where, key);
    if (!base.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    Json& slot = base[key];
    if (!compatible(slot, value)) {
      throw ConfigError("config key '" + path + "' has the wrong type (expected " +
                        std::string(slot.type_name()) + ")");
    }
    if (slot.is_object()) {
      merge_checked(slot, value, path);
    } else if (slot.is_number_float()) {
      slot = value.get<double>();
    } else {
      slot = value;
    }
  }
}

Json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
}

void apply_assignment(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("expected key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  // Build the nested patch {"a": {"b": value}} and merge it.
  std::vector<std::string> parts;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  Json patch = value;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    Json wrap = Json::object();
    wrap[*it] = std::move(patch);
    patch = std::move(wrap);
  }
  merge_checked(config, patch);
}

Json resolve_config(const Json& defaults, const std::string& config_path,
                    const std::vector<std::string>& assignments,
                    const Json& flags) {
  Json config = defaults;
  if (!config_path.empty()) merge_checked(config, read_config_file(config_path));
  for (const auto& a : assignments) apply_assignment(config, a);
  for (const auto& [key, value] : flags.items()) {
    apply_assignment(config, key + "=" + value.dump());
  }
  return config;
}

double get_double(const Json& c, const std::string& key) {
  const Json& v = lookup(c, key);
  if (!v.is_number()) type_error(key, "a number");
  return v.get<double>();
}

long long get_int(const Json& c, const std::string& key) {
  const Json& v = lookup(c, key);
  if (!v.is_number_integer()) type_error(key, "an integer");
  return v.get<long long>();
}

std::string get_string(const Json& c, const std::string& key) {
  const Json& v = lookup(c, key);
  if (!v.is_string()) type_error(key, "a string");
  return v.get<std::string>();
}

bool get_bool(const Json& c, const std::string& key) {
  const Json& v = lookup(c, key);
  if (!v.is_boolean()) type_error(key, "a boolean");
  return v.get<bool>();
}

std::vector<double> get_doubles(const Json& c, const std::string& key) {
  const Json& v = lookup(c, key);
  std::vector<double> out;
  if (!v.is_array()) type_error(key, "a list of numbers");
  for (const auto& e : v) {
    if (!e.is_number()) type_error(key, "a list of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<long long> get_ints(const Json& c, const std::string& key) {
  const Json& v = lookup(c, key);
  std::vector<long long> out;
  if (!v.is_array()) type_error(key, "a list of integers");
  for (const auto& e : v) {
    if (!e.is_number_integer()) type_error(key, "a list of integers");
    out.push_back(e.get<long long>());
  }
  return out;
}

std::vector<std::string> get_strings(const Json& c, const std::string& key) {
  const Json& v = lookup(c, key);
  std::vector<std::string> out;
  if (!v.is_array()) type_error(key, "a list of strings");
  for (const auto& e : v) {
    if (!e.is_string()) type_error(key, "a list of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace fybench::cli
