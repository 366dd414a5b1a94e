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
#include <vector>

#include "cornersim/corner.hpp"

namespace cornersim {

/// Uhlmann fidelity of two corner states without reconstructing either
/// density matrix: F = tr sqrt(sqrt(rho) rho' sqrt(rho)) equals the
/// nuclear norm of C^dagger C', evaluated from the M x M' overlap matrix.
/// Cost O(M M' N).
double fidelity_mixed(const CornerBasis& a, const CornerBasis& b);

/// F(rho, |phi>) = sqrt(<phi| rho |phi>) = ||C^dagger phi||. Cost O(M N).
double fidelity_to_pure(const CornerBasis& a, const Vec& phi);

/// -sum_k p_k ln p_k over the retained weights (nats); 0 ln 0 := 0. The
/// discarded tail (<= eps per step) is not imputed.
double von_neumann_entropy(const CornerBasis& a);

/// Entanglement entropy of the bipartition {1..n | n+1..L}: the entropy
/// of rho_B = tr_{1..n} rho, computed from the reduced spectrum. Uses the
/// smaller side (dense reduced matrix, or its Gram mirror when the kept
/// side is large); refuses cuts where both sides exceed dense_side_cap.
double entanglement_entropy(const CornerBasis& a, int cut, std::int64_t dense_side_cap = 4096);

struct SpinStatistics {
    double n_up = 0.0;       // sum_l tr(|up><up|_l rho)
    double barycenter = 0.0; // (1/n_up) sum_l l tr(|up><up|_l rho); NaN when undefined
    bool barycenter_defined = false;
    std::vector<double> site_up_weight; // per-site excited population
};

SpinStatistics spin_statistics(const CornerBasis& a);

/// One sampled point of an initial-state sweep.
struct SweepRecord {
    std::int64_t basis_index = 0;
    double n_up = 0.0;
    double barycenter = 0.0;
    double infidelity = 0.0;
};

/// Parameters of 1 - F(n_S, B) = a (n_S - n_S0)(B - B_0) + I_0.
struct BilinearFit {
    double a = 0.0;
    double n_s0 = 0.0;
    double b_0 = 0.0;
    double i_0 = 0.0;
    double rms_residual = 0.0;
    // Raw linear-model coefficients of [n_S B, n_S, B, 1].
    double coeff_nb = 0.0, coeff_n = 0.0, coeff_b = 0.0, coeff_1 = 0.0;

    /// d(1-F)/d n_S evaluated at barycenter B.
    double n_up_sensitivity(double barycenter) const { return coeff_nb * barycenter + coeff_n; }
};

/// Least-squares fit of the bilinear surface: solved in the expanded
/// 4-term linear model and back-substituted. Requires >= 8 records
/// spanning >= 3 distinct n_S and B values; throws on a collinear design.
BilinearFit bilinear_fit(const std::vector<SweepRecord>& records);

} // namespace cornersim
