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
#include <stdexcept>
#include <string>

namespace cornersim {

/// Description of the underlying Hilbert space: either a register of L
/// qubits (dimension 2^L) or a single bosonic mode truncated at n_ph
/// photons (dimension n_ph + 1).
///
/// Basis convention for qubits: index n is read as an L-bit string with
/// qubit 1 as the most significant bit. Qubit state |0> is the excited
/// state |up>, |1> the ground state |down>.
struct HilbertSpec {
    enum class Kind { Qubits, Boson };

    Kind kind = Kind::Qubits;
    int num_qubits = 0;   // L, valid for Kind::Qubits
    int photon_cutoff = 0; // n_ph, valid for Kind::Boson
    std::int64_t dim = 0;  // N

    static HilbertSpec qubits(int L) {
        if (L < 1 || L > 30) {
            throw std::invalid_argument("HilbertSpec: qubit count must be in [1, 30], got " +
                                        std::to_string(L));
        }
        HilbertSpec h;
        h.kind = Kind::Qubits;
        h.num_qubits = L;
        h.dim = std::int64_t{1} << L;
        return h;
    }

    static HilbertSpec boson(int n_ph) {
        if (n_ph < 1) {
            throw std::invalid_argument("HilbertSpec: photon cutoff must be >= 1");
        }
        HilbertSpec h;
        h.kind = Kind::Boson;
        h.photon_cutoff = n_ph;
        h.dim = n_ph + 1;
        return h;
    }

    /// Number of addressable sites: L for qubits, 1 for a boson mode.
    int num_sites() const { return kind == Kind::Qubits ? num_qubits : 1; }

    /// Bit position (from the least significant end) of 1-based qubit
    /// index `site`. Qubit 1 owns the most significant bit.
    int bit_of_site(int site) const { return num_qubits - site; }

    bool operator==(const HilbertSpec& o) const {
        return kind == o.kind && num_qubits == o.num_qubits && photon_cutoff == o.photon_cutoff;
    }
    bool operator!=(const HilbertSpec& o) const { return !(*this == o); }
};

} // namespace cornersim
