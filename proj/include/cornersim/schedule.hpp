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

#include <array>
#include <string>
#include <vector>

#include "cornersim/operator_spec.hpp"

namespace cornersim {

/// One continuously-driven interval: a constant Hamiltonian applied for a
/// fixed duration. Switching between segments is sudden.
struct Segment {
    std::string label;
    OperatorSpec hamiltonian;
    double duration = 0.0; // in units of 1/delta
};

struct GateSchedule {
    HilbertSpec space;
    std::vector<Segment> segments;

    GateSchedule() = default;
    explicit GateSchedule(HilbertSpec h) : space(h) {}

    void append(Segment s);
    double total_duration() const;
    bool empty() const { return segments.empty(); }
};

/// Hadamard on qubit `site` as two segments: a pi/2 rotation about -y for
/// pi/(2 delta) followed by a pi rotation about z for pi/delta. The
/// composite equals the Hadamard up to a global phase.
std::array<Segment, 2> hadamard_segments(HilbertSpec h, int site, double delta);

/// Controlled phase of angle theta between qubits j and k:
/// H = (delta/4)(sigma_j^z + sigma_k^z - sigma_j^z sigma_k^z - 1) for a
/// duration theta/delta, giving diag(1,1,1,e^{i theta}) on the pair.
Segment controlled_phase_segment(HilbertSpec h, int j, int k, double theta, double delta);

/// The full QFT ladder: for i = 1..L a Hadamard pair on qubit i followed
/// by controlled phases theta = pi/2^m with control i+m, target i. The
/// resulting unitary is the DFT with bit-reversed output order (no
/// terminal swap network).
GateSchedule qft_schedule(int L, double delta);

/// Total QFT duration in units of 1/delta, without building the schedule.
double qft_duration(int L);

/// The closed-form QFT preimage of the GHZ state:
/// psi_0[n] = (1 + e^{2 pi i n / N}) / sqrt(2 N).
Vec inverse_qft_ghz_state(int L);

/// (|0...0> + |1...1>)/sqrt(2).
Vec ghz_state(int L);

/// Noiseless output of a schedule: applies each segment's exact unitary
/// e^{-i H tau} to psi_in via the structured operators.
Vec ideal_output(const GateSchedule& schedule, const Vec& psi_in, double tol = 1e-12);

/// Human-readable listing (label, Hamiltonian terms, duration) for
/// inspection and replay.
std::string serialize_schedule(const GateSchedule& schedule);

} // namespace cornersim
