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

#ifndef FYBENCH_CHECKPOINT_H_
#define FYBENCH_CHECKPOINT_H_

#include <cstdint>
#include <string>

#include "fybench/trainer.h"

namespace fybench {

// "FYCK", a u32 header length, a JSON header (dims, dtype, seed, loss), then
// the user, item and node factor matrices as row-major little-endian f64.
void save_checkpoint(const std::string& path, const MFModel& model,
                     std::uint64_t seed, const std::string& loss);

struct Checkpoint {
  MFModel model;
  std::uint64_t seed = 0;
  std::string loss;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace fybench

#endif  // FYBENCH_CHECKPOINT_H_
