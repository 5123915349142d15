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

#ifndef FYBENCH_TOOLS_EXPERIMENTS_H_
#define FYBENCH_TOOLS_EXPERIMENTS_H_

#include <ostream>

#include "config.h"

namespace fybench::cli {

// Default documents. Config files and --set may only touch these keys.
Json biasvar_defaults();
Json train_defaults();
Json bench_defaults();
Json calibration_defaults();

// Each command writes its files and manifest.json under config["out"].
void cmd_biasvar(const Json& config, std::ostream& out);
void cmd_train(const Json& config, std::ostream& out);
void cmd_bench(const Json& config, std::ostream& out);
void cmd_calibration(const Json& config, std::ostream& out);

}  // namespace fybench::cli

#endif  // FYBENCH_TOOLS_EXPERIMENTS_H_
