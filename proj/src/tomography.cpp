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

#include "cornersim/tomography.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace cornersim {

namespace {

Mat single_pauli(int a) {
    switch (a) {
        case 0: return Mat::Identity(2, 2);
        case 1: return ops::pauli_x();
        case 2: return ops::pauli_y();
        default: return ops::pauli_z();
    }
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
        }
    }
    return out;
}

/// Column-stacks E(e_ij) into the Choi matrix indexed (r*4+i, s*4+j).
Mat choi_from_basis_action(const std::array<Mat, 16>& action) {
    Mat choi = Mat::Zero(16, 16);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const Mat& e_out = action[i * 4 + j];
            for (int r = 0; r < 4; ++r) {
                for (int s = 0; s < 4; ++s) {
                    choi(r * 4 + i, s * 4 + j) = e_out(r, s);
                }
            }
        }
    }
    return choi;
}

/// E(e_ij) recovered from a Choi matrix.
std::array<Mat, 16> basis_action_from_choi(const Mat& choi) {
    std::array<Mat, 16> action;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            Mat e_out(4, 4);
            for (int r = 0; r < 4; ++r) {
                for (int s = 0; s < 4; ++s) {
                    e_out(r, s) = choi(r * 4 + i, s * 4 + j);
                }
            }
            action[i * 4 + j] = std::move(e_out);
        }
    }
    return action;
}

} // namespace

std::string pauli_label(int index) {
    static const char* names = "IXYZ";
    if (index < 0 || index > 15) throw std::invalid_argument("pauli_label: index out of range");
    return std::string{names[index / 4], names[index % 4]};
}

Mat pauli_string(int index) {
    if (index < 0 || index > 15) throw std::invalid_argument("pauli_string: index out of range");
    return kron(single_pauli(index / 4), single_pauli(index % 4));
}

bool is_iz_string(int index) {
    const int a = index / 4, b = index % 4;
    return (a == 0 || a == 3) && (b == 0 || b == 3);
}

int pauli_weight(int index) {
    return (index / 4 != 0 ? 1 : 0) + (index % 4 != 0 ? 1 : 0);
}

Mat channel_from_evolution(const GateSchedule& gate, const NoiseModel& noise, double tol) {
    if (noise.space.dim != 4) {
        throw std::invalid_argument("channel_from_evolution: two-qubit systems only");
    }
    // Informationally complete product inputs |0>, |1>, |+>, |+i> per qubit.
    std::array<Vec, 4> kets;
    kets[0] = Vec::Zero(2);
    kets[0][0] = 1.0;
    kets[1] = Vec::Zero(2);
    kets[1][1] = 1.0;
    kets[2] = Vec::Constant(2, 1.0 / std::sqrt(2.0));
    kets[3] = Vec::Zero(2);
    kets[3][0] = 1.0 / std::sqrt(2.0);
    kets[3][1] = cxd(0.0, 1.0 / std::sqrt(2.0));

    std::array<Mat, 16> inputs, outputs;
    for (int x = 0; x < 4; ++x) {
        for (int y = 0; y < 4; ++y) {
            Vec psi(4);
            for (int r = 0; r < 2; ++r) {
                for (int s = 0; s < 2; ++s) psi[r * 2 + s] = kets[x][r] * kets[y][s];
            }
            inputs[x * 4 + y] = psi * psi.adjoint();
        }
    }
    for (int idx = 0; idx < 16; ++idx) {
        DenseState in{noise.space, inputs[idx], 0.0};
        DenseState out = gate.empty() ? in : integrate_exact(in, gate, noise, tol);
        outputs[idx] = out.rho;
    }

    // Solve for the matrix-unit responses: vec(e_ij) = S c with S the
    // stacked input states.
    Mat s(16, 16);
    for (int idx = 0; idx < 16; ++idx) {
        s.col(idx) = Eigen::Map<const Vec>(inputs[idx].data(), 16);
    }
    Eigen::PartialPivLU<Mat> lu(s);
    std::array<Mat, 16> action;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            Mat e_ij = Mat::Zero(4, 4);
            e_ij(i, j) = 1.0;
            Vec coeff = lu.solve(Eigen::Map<const Vec>(e_ij.data(), 16));
            Mat out = Mat::Zero(4, 4);
            for (int idx = 0; idx < 16; ++idx) out += coeff[idx] * outputs[idx];
            action[i * 4 + j] = std::move(out);
        }
    }
    Mat choi = choi_from_basis_action(action);

    // Physicality checks: complete positivity and trace preservation.
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (choi + choi.adjoint()));
    if (es.eigenvalues().minCoeff() < -1e-8) {
        throw NumericalFailure("channel_from_evolution: Choi matrix is not positive (min eig " +
                               std::to_string(es.eigenvalues().minCoeff()) + ")");
    }
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const cxd tr = action[i * 4 + j].trace();
            const cxd expected = (i == j) ? cxd(1.0, 0.0) : cxd(0.0, 0.0);
            if (std::abs(tr - expected) > 1e-6) {
                throw NumericalFailure("channel_from_evolution: trace preservation violated");
            }
        }
    }
    return choi;
}

Mat choi_from_kraus(const std::vector<Mat>& kraus) {
    std::array<Mat, 16> action;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            Mat e_ij = Mat::Zero(4, 4);
            e_ij(i, j) = 1.0;
            Mat out = Mat::Zero(4, 4);
            for (const Mat& k : kraus) out += k * e_ij * k.adjoint();
            action[i * 4 + j] = std::move(out);
        }
    }
    return choi_from_basis_action(action);
}

Mat apply_choi(const Mat& choi, const Mat& x) {
    const auto action = basis_action_from_choi(choi);
    Mat out = Mat::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) out += x(i, j) * action[i * 4 + j];
    }
    return out;
}

Mat ideal_unitary(const GateSchedule& schedule) {
    const Eigen::Index n = schedule.space.dim;
    Mat u = Mat::Identity(n, n);
    for (const Segment& seg : schedule.segments) {
        Mat gen = cxd(0.0, -seg.duration) * seg.hamiltonian.to_dense();
        u = gen.exp() * u;
    }
    return u;
}

Mat chi_from_choi(const Mat& choi) {
    // Choi = V chi V^dagger with V's columns the flattened Pauli strings;
    // V^dagger V = 4 I gives chi = V^+ Choi V / 16.
    Mat v(16, 16);
    for (int m = 0; m < 16; ++m) {
        Mat p = pauli_string(m);
        for (int r = 0; r < 4; ++r) {
            for (int i = 0; i < 4; ++i) v(r * 4 + i, m) = p(r, i);
        }
    }
    return (v.adjoint() * choi * v) / 16.0;
}

ChiMatrix error_chi(const Mat& choi, const GateSchedule& ideal, double gamma_tau) {
    Mat u = ideal_unitary(ideal);
    const auto action = basis_action_from_choi(choi);

    // E_G(X) = E_total(U^+ X U): undo the ideal unitary at the input.
    std::array<Mat, 16> err_action;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            Mat e_ij = Mat::Zero(4, 4);
            e_ij(i, j) = 1.0;
            Mat rotated = u.adjoint() * e_ij * u;
            Mat out = Mat::Zero(4, 4);
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) out += rotated(a, b) * action[a * 4 + b];
            }
            err_action[i * 4 + j] = std::move(out);
        }
    }
    ChiMatrix result;
    result.chi = chi_from_choi(choi_from_basis_action(err_action));
    result.gamma_tau = gamma_tau;
    return result;
}

Eigen::MatrixXd ChiMatrix::report() const {
    Eigen::MatrixXd out = chi.cwiseAbs() / gamma_tau;
    out(0, 0) = 0.0;
    return out;
}

} // namespace cornersim
