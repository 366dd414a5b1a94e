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

#include "cornersim/dense_oracle.hpp"

namespace cornersim {

/// Two-qubit process error matrix in the Pauli basis {I,X,Y,Z}^2,
/// lexicographic, index 0 = II. Entries are reported normalized by the
/// characteristic error magnitude gamma*tau.
struct ChiMatrix {
    Mat chi;            // 16 x 16, Hermitian PSD
    double gamma_tau = 0.0;

    /// |chi_mn| / (gamma tau) with the (II,II) element zeroed for
    /// readability.
    Eigen::MatrixXd report() const;
};

/// Pauli-string label for index 0..15 ("II", "IX", ..., "ZZ").
std::string pauli_label(int index);

/// The two-qubit Pauli P_{4a+b} = P_a (x) P_b 4x4 matrix.
Mat pauli_string(int index);

/// True if the string contains only I and Z factors.
bool is_iz_string(int index);
/// Number of non-identity factors (0, 1 or 2).
int pauli_weight(int index);

/// Process tomography of a two-qubit continuous-time channel: evolves an
/// informationally complete set of 16 product inputs (|0>,|1>,|+>,|+i>)
/// through the Lindblad dynamics, reconstructs the action on matrix
/// units, and assembles the Choi matrix (16x16). Verifies complete
/// positivity and trace preservation.
Mat channel_from_evolution(const GateSchedule& gate, const NoiseModel& noise, double tol = 1e-10);

/// Choi matrix of the channel rho -> sum_k K_k rho K_k^dagger.
Mat choi_from_kraus(const std::vector<Mat>& kraus);

/// Applies a Choi-represented channel to an input matrix.
Mat apply_choi(const Mat& choi, const Mat& x);

/// Dense unitary of a schedule (product of segment exponentials).
Mat ideal_unitary(const GateSchedule& schedule);

/// Pauli-basis chi matrix of a Choi-represented channel.
Mat chi_from_choi(const Mat& choi);

/// Isolates the error process E_G (the full channel composed with the
/// inverse ideal unitary) and expresses it in the Pauli basis.
ChiMatrix error_chi(const Mat& choi, const GateSchedule& ideal, double gamma_tau);

} // namespace cornersim
