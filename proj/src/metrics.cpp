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

#include "cornersim/metrics.hpp"

#include <cmath>
#include <set>

namespace cornersim {

double fidelity_mixed(const CornerBasis& a, const CornerBasis& b) {
    if (a.space != b.space) {
        throw std::invalid_argument("fidelity_mixed: states on different Hilbert spaces");
    }
    // M = (C_a^+ C_b)(C_a^+ C_b)^+ is the paper's overlap matrix; its
    // trace-sqrt is the sum of singular values of C_a^+ C_b.
    Mat overlap = a.C.adjoint() * b.C;
    Eigen::JacobiSVD<Mat> svd(overlap);
    return svd.singularValues().sum();
}

double fidelity_to_pure(const CornerBasis& a, const Vec& phi) {
    if (phi.size() != a.space.dim) {
        throw std::invalid_argument("fidelity_to_pure: vector length mismatch");
    }
    return (a.C.adjoint() * phi).norm();
}

double von_neumann_entropy(const CornerBasis& a) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < a.p.size(); ++k) {
        const double p = a.p[k];
        if (p > 0.0) s -= p * std::log(p);
    }
    return s;
}

double entanglement_entropy(const CornerBasis& a, int cut, std::int64_t dense_side_cap) {
    if (a.space.kind != HilbertSpec::Kind::Qubits) {
        throw std::invalid_argument("entanglement_entropy: defined for qubit registers");
    }
    const int L = a.space.num_qubits;
    if (cut < 1 || cut >= L) {
        throw std::invalid_argument("entanglement_entropy: cut must satisfy 1 <= n < L");
    }
    const std::int64_t dim_a = std::int64_t{1} << cut;       // traced side, high bits
    const std::int64_t dim_b = std::int64_t{1} << (L - cut); // kept side, low bits
    const Eigen::Index m = a.C.cols();

    Eigen::VectorXd lam;
    if (dim_b <= dense_side_cap) {
        Mat rho_b = Mat::Zero(dim_b, dim_b);
        for (Eigen::Index k = 0; k < m; ++k) {
            Eigen::Map<const Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                psi(a.C.col(k).data(), dim_a, dim_b);
            rho_b.noalias() += psi.transpose() * psi.conjugate();
        }
        lam = Eigen::SelfAdjointEigenSolver<Mat>(rho_b, Eigen::EigenvaluesOnly).eigenvalues();
    } else if (dim_a <= dense_side_cap) {
        // Kept side too large to densify: rho_B = X^T X^* for the
        // (M dim_a) x dim_b row stack, which shares its nonzero spectrum
        // with the small Gram matrix X^* X^T.
        Mat x(m * dim_a, dim_b);
        for (Eigen::Index k = 0; k < m; ++k) {
            Eigen::Map<const Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                psi(a.C.col(k).data(), dim_a, dim_b);
            x.middleRows(k * dim_a, dim_a) = psi;
        }
        Mat gram = x.conjugate() * x.transpose();
        lam = Eigen::SelfAdjointEigenSolver<Mat>(gram, Eigen::EigenvaluesOnly).eigenvalues();
    } else {
        throw std::invalid_argument(
            "entanglement_entropy: both sides of the cut exceed the dense-side cap");
    }

    double s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam[i] > 1e-15) s -= lam[i] * std::log(lam[i]);
    }
    return s;
}

SpinStatistics spin_statistics(const CornerBasis& a) {
    if (a.space.kind != HilbertSpec::Kind::Qubits) {
        throw std::invalid_argument("spin_statistics: defined for qubit registers");
    }
    const int L = a.space.num_qubits;
    SpinStatistics stats;
    stats.site_up_weight.assign(L, 0.0);
    for (Eigen::Index k = 0; k < a.C.cols(); ++k) {
        for (std::int64_t n = 0; n < a.space.dim; ++n) {
            const double w = std::norm(a.C(n, k));
            if (w == 0.0) continue;
            for (int site = 1; site <= L; ++site) {
                if (((n >> a.space.bit_of_site(site)) & 1) == 0) {
                    stats.site_up_weight[site - 1] += w;
                }
            }
        }
    }
    double weighted_pos = 0.0;
    for (int site = 1; site <= L; ++site) {
        stats.n_up += stats.site_up_weight[site - 1];
        weighted_pos += site * stats.site_up_weight[site - 1];
    }
    if (stats.n_up > 0.0) {
        stats.barycenter = weighted_pos / stats.n_up;
        stats.barycenter_defined = true;
    } else {
        stats.barycenter = std::numeric_limits<double>::quiet_NaN();
        stats.barycenter_defined = false;
    }
    return stats;
}

BilinearFit bilinear_fit(const std::vector<SweepRecord>& records) {
    if (records.size() < 8) {
        throw std::invalid_argument("bilinear_fit: need at least 8 records");
    }
    std::set<double> ns, bs;
    for (const auto& r : records) {
        ns.insert(r.n_up);
        bs.insert(r.barycenter);
    }
    if (ns.size() < 3 || bs.size() < 3) {
        throw std::invalid_argument("bilinear_fit: records must span >= 3 distinct n_S and B values");
    }

    const Eigen::Index n = static_cast<Eigen::Index>(records.size());
    Eigen::MatrixXd design(n, 4);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = records[i];
        design(i, 0) = r.n_up * r.barycenter;
        design(i, 1) = r.n_up;
        design(i, 2) = r.barycenter;
        design(i, 3) = 1.0;
        rhs[i] = r.infidelity;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 4) {
        throw std::invalid_argument("bilinear_fit: degenerate (collinear) design matrix");
    }
    Eigen::Vector4d x = qr.solve(rhs);

    BilinearFit fit;
    fit.coeff_nb = x[0];
    fit.coeff_n = x[1];
    fit.coeff_b = x[2];
    fit.coeff_1 = x[3];
    fit.a = x[0];
    const double scale = rhs.cwiseAbs().maxCoeff() + 1e-300;
    if (std::abs(fit.a) > 1e-12 * scale) {
        fit.b_0 = -x[1] / fit.a;
        fit.n_s0 = -x[2] / fit.a;
        fit.i_0 = x[3] - x[1] * x[2] / fit.a;
    } else {
        // Flat surface: centers are unidentifiable, report the offset.
        fit.b_0 = 0.0;
        fit.n_s0 = 0.0;
        fit.i_0 = x[3];
    }
    fit.rms_residual = std::sqrt((design * x - rhs).squaredNorm() / static_cast<double>(n));
    return fit;
}

} // namespace cornersim
