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

#include "cornersim/schedule.hpp"

#include <cmath>
#include <sstream>

#include "cornersim/integrator.hpp"

namespace cornersim {

void GateSchedule::append(Segment s) {
    if (!(s.duration > 0.0) || !std::isfinite(s.duration)) {
        throw std::invalid_argument("GateSchedule: segment duration must be positive");
    }
    if (s.hamiltonian.space != space) {
        throw std::invalid_argument("GateSchedule: segment Hamiltonian on a different space");
    }
    segments.push_back(std::move(s));
}

double GateSchedule::total_duration() const {
    double total = 0.0;
    for (const Segment& s : segments) total += s.duration;
    return total;
}

std::array<Segment, 2> hadamard_segments(HilbertSpec h, int site, double delta) {
    if (site < 1 || site > h.num_qubits) {
        throw std::invalid_argument("hadamard_segments: qubit index out of range");
    }
    if (!(delta > 0.0)) {
        throw std::invalid_argument("hadamard_segments: delta must be positive");
    }
    const std::string q = "q" + std::to_string(site);
    Segment y{"hadamard_y " + q,
              ops::single_site(h, site, ops::pauli_y(), -delta / 2.0, true),
              M_PI / (2.0 * delta)};
    Segment z{"hadamard_z " + q,
              ops::single_site(h, site, ops::pauli_z(), delta / 2.0, true),
              M_PI / delta};
    return {std::move(y), std::move(z)};
}

Segment controlled_phase_segment(HilbertSpec h, int j, int k, double theta, double delta) {
    if (j == k) {
        throw std::invalid_argument("controlled_phase_segment: control and target must differ");
    }
    if (j < 1 || j > h.num_qubits || k < 1 || k > h.num_qubits) {
        throw std::invalid_argument("controlled_phase_segment: qubit index out of range");
    }
    if (!(theta > 0.0) || !(delta > 0.0)) {
        throw std::invalid_argument("controlled_phase_segment: theta and delta must be positive");
    }
    OperatorSpec ham(h, true);
    const double c = delta / 4.0;
    ham.add_term(c, {LocalFactor{j, ops::pauli_z()}});
    ham.add_term(c, {LocalFactor{k, ops::pauli_z()}});
    ham.add_term(-c, {LocalFactor{j, ops::pauli_z()}, LocalFactor{k, ops::pauli_z()}});
    ham.add_term(-c, {});
    std::ostringstream label;
    label << "cphase q" << j << ",q" << k << " theta=" << theta;
    return Segment{label.str(), std::move(ham), theta / delta};
}

GateSchedule qft_schedule(int L, double delta) {
    HilbertSpec h = HilbertSpec::qubits(L);
    GateSchedule schedule(h);
    for (int i = 1; i <= L; ++i) {
        auto had = hadamard_segments(h, i, delta);
        schedule.append(std::move(had[0]));
        schedule.append(std::move(had[1]));
        for (int m = 1; m <= L - i; ++m) {
            schedule.append(
                controlled_phase_segment(h, i + m, i, M_PI / std::pow(2.0, m), delta));
        }
    }
    return schedule;
}

double qft_duration(int L) {
    if (L < 1) throw std::invalid_argument("qft_duration: L must be >= 1");
    // L Hadamard pairs of 3*pi/2 each plus sum of controlled-phase times.
    double total = L * 1.5 * M_PI;
    for (int i = 1; i <= L; ++i) {
        for (int m = 1; m <= L - i; ++m) total += M_PI / std::pow(2.0, m);
    }
    return total;
}

Vec inverse_qft_ghz_state(int L) {
    const std::int64_t n = HilbertSpec::qubits(L).dim;
    Vec psi(n);
    const double norm = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
    for (std::int64_t k = 0; k < n; ++k) {
        const double phase = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
        psi[k] = norm * (1.0 + std::polar(1.0, phase));
    }
    return psi;
}

Vec ghz_state(int L) {
    const std::int64_t n = HilbertSpec::qubits(L).dim;
    Vec psi = Vec::Zero(n);
    psi[0] = 1.0 / std::sqrt(2.0);
    psi[n - 1] = 1.0 / std::sqrt(2.0);
    return psi;
}

Vec ideal_output(const GateSchedule& schedule, const Vec& psi_in, double tol) {
    Vec psi = psi_in;
    KrylovOptions opts;
    opts.tol = tol;
    for (const Segment& seg : schedule.segments) {
        if (seg.hamiltonian.is_zero()) continue;
        LinearMap gen = [&seg](const Vec& x, Vec& y) {
            Vec scratch;
            y.setZero(x.size());
            apply_operator_add(seg.hamiltonian, x, y, scratch);
            y *= cxd(0.0, -1.0);
        };
        psi = krylov_expv(gen, psi, seg.duration, opts);
    }
    return psi;
}

std::string serialize_schedule(const GateSchedule& schedule) {
    std::ostringstream out;
    out.precision(17);
    out << "# segments: " << schedule.segments.size()
        << "  total_duration: " << schedule.total_duration() << "\n";
    for (const Segment& seg : schedule.segments) {
        out << "segment \"" << seg.label << "\" duration " << seg.duration << "\n";
        for (const auto& term : seg.hamiltonian.terms) {
            out << "  term (" << term.coeff.real() << "," << term.coeff.imag() << ")";
            if (term.factors.empty()) out << " identity";
            for (const auto& f : term.factors) {
                out << " site " << f.site << " [";
                for (Eigen::Index r = 0; r < f.matrix.rows(); ++r) {
                    for (Eigen::Index c = 0; c < f.matrix.cols(); ++c) {
                        out << "(" << f.matrix(r, c).real() << "," << f.matrix(r, c).imag() << ")";
                        if (r + 1 < f.matrix.rows() || c + 1 < f.matrix.cols()) out << " ";
                    }
                }
                out << "]";
            }
            out << "\n";
        }
    }
    return out.str();
}

} // namespace cornersim
