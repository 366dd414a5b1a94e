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

#include "cornersim/noise.hpp"

#include <cmath>

namespace cornersim {

namespace {

void check_rate(double gamma) {
    if (gamma < 0.0 || !std::isfinite(gamma)) {
        throw std::invalid_argument("NoiseModel: rate must be finite and >= 0");
    }
}

void check_qubits(const HilbertSpec& h) {
    if (h.kind != HilbertSpec::Kind::Qubits) {
        throw std::invalid_argument("NoiseModel: qubit-register factory applied to a boson mode");
    }
}

NoiseModel per_site(HilbertSpec h, const std::vector<double>& gammas, const Mat& local) {
    check_qubits(h);
    if (static_cast<int>(gammas.size()) != h.num_qubits) {
        throw std::invalid_argument("NoiseModel: need one rate per qubit");
    }
    NoiseModel noise(h);
    for (int site = 1; site <= h.num_qubits; ++site) {
        const double g = gammas[site - 1];
        check_rate(g);
        noise.add_jump(ops::single_site(h, site, local, std::sqrt(g)));
    }
    return noise;
}

} // namespace

NoiseModel local_decay(HilbertSpec h, double gamma) {
    check_rate(gamma);
    return local_decay(h, std::vector<double>(h.num_qubits, gamma));
}

NoiseModel local_decay(HilbertSpec h, const std::vector<double>& gammas) {
    return per_site(h, gammas, ops::sigma_minus());
}

NoiseModel local_dephasing(HilbertSpec h, double gamma) {
    check_rate(gamma);
    return local_dephasing(h, std::vector<double>(h.num_qubits, gamma));
}

NoiseModel local_dephasing(HilbertSpec h, const std::vector<double>& gammas) {
    return per_site(h, gammas, ops::pauli_z());
}

NoiseModel collective_dephasing(HilbertSpec h, double gamma) {
    check_qubits(h);
    check_rate(gamma);
    NoiseModel noise(h);
    OperatorSpec jz(h);
    const double scale = std::sqrt(gamma / h.num_qubits);
    for (int site = 1; site <= h.num_qubits; ++site) {
        jz.add_term(scale, {LocalFactor{site, ops::pauli_z()}});
    }
    noise.add_jump(std::move(jz));
    return noise;
}

} // namespace cornersim
