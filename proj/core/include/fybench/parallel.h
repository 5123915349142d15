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

#ifndef FYBENCH_PARALLEL_H_
#define FYBENCH_PARALLEL_H_

#include <functional>

#include "fybench/common.h"

namespace fybench {

// FYBENCH_THREADS when set to a positive integer, otherwise the number of
// logical cores (at least 1).
int worker_count();

// Calls fn(i) for i in [0, n) on up to `threads` workers (0 = worker_count()).
// Each index runs exactly once; callers write results by index so the outcome
// does not depend on scheduling. The first exception is rethrown.
void parallel_for(Index n, const std::function<void(Index)>& fn, int threads = 0);

}  // namespace fybench

#endif  // FYBENCH_PARALLEL_H_
