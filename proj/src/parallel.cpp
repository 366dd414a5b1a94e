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

#include "cornersim/parallel.hpp"

#include <algorithm>
#include <thread>

namespace cornersim {

namespace {
int g_workers = []() {
    unsigned hw = std::thread::hardware_concurrency();
    return std::max(1, static_cast<int>(hw));
}();
}

void set_worker_threads(int n) { g_workers = std::max(1, n); }

int worker_threads() { return g_workers; }

} // namespace cornersim
