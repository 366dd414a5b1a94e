// Copyright 2026 The cornersim authors.
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

#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cornersim {

/// Sets the global worker count for parallel loops (and Eigen, via the
/// caller). n <= 1 forces serial execution.
void set_worker_threads(int n);
int worker_threads();

/// Runs body(i) for i in [0, count). Iterations must be independent; the
/// result is identical to the serial loop since each index writes its own
/// outputs.
template <typename F>
void parallel_for(std::int64_t count, F&& body) {
#ifdef _OPENMP
    if (worker_threads() > 1 && count > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
        for (std::int64_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
#endif
    for (std::int64_t i = 0; i < count; ++i) {
        body(i);
    }
}

} // namespace cornersim
