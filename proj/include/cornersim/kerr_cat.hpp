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

#include "cornersim/corner.hpp"

namespace cornersim {

/// Two-photon-driven Kerr resonator with one- and two-photon loss. Rates
/// are in units of the one-photon loss gamma unless configured otherwise.
struct KerrParams {
    double kerr = 10.0;     // K
    double omega_c = 1.0;   // cavity frequency
    double drive = 50.0;    // G, two-photon drive amplitude
    double gamma = 1.0;     // one-photon loss rate
    double kappa = 2.0;     // two-photon loss rate
    int n_ph = 20;          // Fock cutoff

    /// Cutoff adequacy: the steady cats live at |alpha|^2 = G/K.
    void validate() const;
};

/// H = K a^+ a^+ a a + omega_c a^+ a + G (a^2 + a^+2), with jumps
/// J_1 = sqrt(gamma) a and J_2 = sqrt(kappa) a^2.
std::pair<OperatorSpec, NoiseModel> kerr_model(const KerrParams& params);

struct KerrRunResult {
    CornerBasis state;
    KrylovStats substep_stats;
    std::vector<double> column_parity; // <phi_k| (-1)^n |phi_k> per column
    double mean_photons = 0.0;
    double tail_population = 0.0; // weight in the top two Fock levels
    int max_corner_dim = 0;
};

/// Evolves the vacuum under the Kerr-cat Lindbladian to t_final with the
/// corner engine. The coherent substep must cope with the stiffness of
/// the Kerr nonlinearity; fixed-step explicit first-order schemes are not
/// offered here.
KerrRunResult run_kerr_cat(const KerrParams& params, double t_final, const StepConfig& cfg);

/// Displaced-parity Wigner function W(alpha) = (2/pi) <psi|D(alpha) P
/// D(alpha)^+|psi> of a pure Fock-space column, on the grid
/// re_grid x im_grid (alpha = x + i y). Errors out when the grid extent
/// is far beyond what the cutoff can represent.
Eigen::MatrixXd wigner(const Vec& column, const Eigen::VectorXd& re_grid,
                       const Eigen::VectorXd& im_grid);

/// Uniform grid helper: `points` samples covering [-extent, extent].
Eigen::VectorXd wigner_axis(double extent, int points);

} // namespace cornersim
