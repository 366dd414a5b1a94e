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

#include "cornersim/kerr_cat.hpp"

#include <cmath>

#include "cornersim/parallel.hpp"

namespace cornersim {

void KerrParams::validate() const {
    if (n_ph < 2) throw std::invalid_argument("KerrParams: cutoff must be >= 2");
    if (kerr < 0 || drive < 0 || gamma < 0 || kappa < 0) {
        throw std::invalid_argument("KerrParams: rates must be >= 0");
    }
    if (kerr > 0.0 && n_ph < 2.0 * drive / kerr) {
        throw std::invalid_argument("KerrParams: cutoff n_ph below 2 G/K; cats would be clipped");
    }
}

std::pair<OperatorSpec, NoiseModel> kerr_model(const KerrParams& params) {
    params.validate();
    HilbertSpec h = HilbertSpec::boson(params.n_ph);
    const Mat a = ops::annihilation(params.n_ph);
    const Mat adag = ops::creation(params.n_ph);
    const Mat a2 = a * a;

    Mat h_local = params.kerr * (adag * adag * a2) + params.omega_c * (adag * a) +
                  params.drive * (a2 + (a2).adjoint());
    OperatorSpec hamiltonian = ops::boson_op(h, h_local, 1.0, true);

    NoiseModel noise(h);
    noise.add_jump(ops::boson_op(h, a, std::sqrt(params.gamma)));
    noise.add_jump(ops::boson_op(h, a2, std::sqrt(params.kappa)));
    return {std::move(hamiltonian), std::move(noise)};
}

KerrRunResult run_kerr_cat(const KerrParams& params, double t_final, const StepConfig& cfg) {
    auto [hamiltonian, noise] = kerr_model(params);
    HilbertSpec h = hamiltonian.space;

    Vec vacuum = Vec::Zero(h.dim);
    vacuum[0] = 1.0;
    CornerBasis state = from_pure_state(h, vacuum);

    CornerStepper stepper(hamiltonian, noise, cfg);
    const long nsteps = std::max<long>(1, static_cast<long>(std::ceil(t_final / cfg.dt - 1e-9)));
    int max_m = 1;
    for (long i = 0; i < nsteps; ++i) {
        const double dt = (i + 1 == nsteps) ? t_final - static_cast<double>(i) * cfg.dt : cfg.dt;
        state = stepper.step(state, dt);
        max_m = std::max(max_m, state.rank());
    }

    KerrRunResult result;
    result.substep_stats = stepper.substep_stats();
    result.max_corner_dim = max_m;

    const Mat parity = ops::parity(params.n_ph);
    const Mat number = ops::number(params.n_ph);
    result.column_parity.resize(state.rank());
    for (int k = 0; k < state.rank(); ++k) {
        const Vec col = state.C.col(k);
        const double pk = state.p[k];
        result.column_parity[k] =
            pk > 0 ? (col.adjoint() * parity * col).real()(0, 0) / pk : 0.0;
        result.mean_photons += (col.adjoint() * number * col).real()(0, 0);
        result.tail_population += std::norm(col[h.dim - 1]) + std::norm(col[h.dim - 2]);
    }
    result.state = std::move(state);
    return result;
}

Eigen::MatrixXd wigner(const Vec& column, const Eigen::VectorXd& re_grid,
                       const Eigen::VectorXd& im_grid) {
    const Eigen::Index dim = column.size();
    const int n_ph = static_cast<int>(dim) - 1;
    const double norm = column.norm();
    if (std::abs(norm - 1.0) > 1e-8) {
        throw std::invalid_argument("wigner: column must be normalized");
    }
    if (n_ph > 80) {
        throw std::invalid_argument("wigner: Laguerre series overflows beyond n_ph = 80");
    }
    const double extent =
        std::max(re_grid.cwiseAbs().maxCoeff(), im_grid.cwiseAbs().maxCoeff());
    if (extent * extent > 4.0 * n_ph) {
        throw std::invalid_argument("wigner: grid extent far beyond the Fock cutoff");
    }

    // Displaced-parity evaluated through the closed-form kernel of
    // |a><b|: W = (2/pi) e^{-2|z|^2} (-1)^a sqrt(a!/b!) (2 z)^{b-a}
    // L_a^{(b-a)}(4 |z|^2), summed against rho_ab = psi_a conj(psi_b).
    // The explicit Gaussian envelope keeps far-field points exact where a
    // truncated displacement operator would reflect off the cutoff.
    Eigen::MatrixXd log_ratio(dim, dim); // 0.5 ln(a!/b!)
    for (Eigen::Index a = 0; a < dim; ++a) {
        for (Eigen::Index b = a; b < dim; ++b) {
            log_ratio(a, b) = 0.5 * (std::lgamma(double(a + 1)) - std::lgamma(double(b + 1)));
        }
    }

    Eigen::MatrixXd w(re_grid.size(), im_grid.size());
    parallel_for(re_grid.size() * im_grid.size(), [&](std::int64_t idx) {
        const Eigen::Index ix = idx / im_grid.size();
        const Eigen::Index iy = idx % im_grid.size();
        const cxd z(re_grid[ix], im_grid[iy]);
        const double b4 = 4.0 * std::norm(z);
        const cxd two_z = 2.0 * z;
        double val = 0.0;
        for (Eigen::Index a = 0; a < dim; ++a) {
            const double pa = std::norm(column[a]);
            const double sign = (a % 2 == 0) ? 1.0 : -1.0;
            if (pa > 1e-32) {
                val += pa * sign * std::assoc_laguerre(unsigned(a), 0, b4);
            }
            cxd power(1.0, 0.0);
            for (Eigen::Index b = a + 1; b < dim; ++b) {
                power *= two_z;
                const cxd rho_ab = column[a] * std::conj(column[b]);
                if (std::abs(rho_ab) < 1e-32) continue;
                const double mag = std::exp(log_ratio(a, b));
                val += 2.0 * sign * mag *
                       (rho_ab * power).real() *
                       std::assoc_laguerre(unsigned(a), unsigned(b - a), b4);
            }
        }
        w(ix, iy) = (2.0 / M_PI) * std::exp(-0.5 * b4) * val;
    });
    return w;
}

Eigen::VectorXd wigner_axis(double extent, int points) {
    if (points < 2 || !(extent > 0)) {
        throw std::invalid_argument("wigner_axis: need extent > 0 and at least 2 points");
    }
    return Eigen::VectorXd::LinSpaced(points, -extent, extent);
}

} // namespace cornersim
