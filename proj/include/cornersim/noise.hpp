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

#include <vector>

#include "cornersim/operator_spec.hpp"

namespace cornersim {

/// A set of jump operators, each already scaled by the square root of its
/// rate. D = jumps.size() is the number of dissipation channels.
struct NoiseModel {
    HilbertSpec space;
    std::vector<OperatorSpec> jumps;

    NoiseModel() = default;
    explicit NoiseModel(HilbertSpec h) : space(h) {}

    int channel_count() const { return static_cast<int>(jumps.size()); }

    void add_jump(OperatorSpec j) {
        if (j.space != space) {
            throw std::invalid_argument("NoiseModel: jump operator on a different Hilbert space");
        }
        jumps.push_back(std::move(j));
    }

    static NoiseModel none(HilbertSpec h) { return NoiseModel(h); }
};

/// sqrt(gamma) sigma^- on every qubit: local decay from |up>=|0> to
/// |down>=|1>. Optionally heterogeneous per-site rates.
NoiseModel local_decay(HilbertSpec h, double gamma);
NoiseModel local_decay(HilbertSpec h, const std::vector<double>& gammas);

/// sqrt(gamma) sigma^z on every qubit: local pure dephasing.
NoiseModel local_dephasing(HilbertSpec h, double gamma);
NoiseModel local_dephasing(HilbertSpec h, const std::vector<double>& gammas);

/// Single collective channel sqrt(gamma) (1/sqrt(L)) sum_i sigma_i^z.
NoiseModel collective_dephasing(HilbertSpec h, double gamma);

} // namespace cornersim
