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

#include "cornersim/dense_oracle.hpp"

#include <chrono>
#include "cornersim/parallel.hpp"
#include <cmath>

namespace cornersim {

namespace {

/// True when every factor of every term is a diagonal matrix.
bool is_diagonal_operator(const OperatorSpec& op) {
    for (const auto& term : op.terms) {
        for (const auto& f : term.factors) {
            for (Eigen::Index r = 0; r < f.matrix.rows(); ++r) {
                for (Eigen::Index c = 0; c < f.matrix.cols(); ++c) {
                    if (r != c && f.matrix(r, c) != cxd(0.0, 0.0)) return false;
                }
            }
        }
    }
    return true;
}

/// Diagonal of a diagonal operator as a length-N vector.
Vec diagonal_vector(const OperatorSpec& op) {
    const HilbertSpec& h = op.space;
    Vec d = Vec::Zero(h.dim);
    for (const auto& term : op.terms) {
        for (std::int64_t n = 0; n < h.dim; ++n) {
            cxd v = term.coeff;
            for (const auto& f : term.factors) {
                const int b = h.kind == HilbertSpec::Kind::Qubits
                                  ? ((n >> h.bit_of_site(f.site)) & 1)
                                  : static_cast<int>(n);
                v *= f.matrix(b, b);
            }
            d[n] += v;
        }
    }
    return d;
}

/// out += (m on `site`) rho (m on `site`)^+ in a single traversal of the
/// 2x2 blocks selected by the site's bit on both indices.
void add_single_site_sandwich(const Mat& m, int bit, const Mat& rho, Mat& out) {
    const cxd m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
    const cxd c00 = std::conj(m00), c01 = std::conj(m01), c10 = std::conj(m10),
              c11 = std::conj(m11);
    const std::int64_t stride = std::int64_t{1} << bit;
    const std::int64_t n = rho.rows();
    const std::int64_t col_pairs = (n / (2 * stride)) * stride;
    parallel_for(col_pairs, [&](std::int64_t idx) {
        const std::int64_t c0 = (idx / stride) * 2 * stride + (idx % stride);
        const std::int64_t c1 = c0 + stride;
        for (std::int64_t base = 0; base < n; base += 2 * stride) {
            for (std::int64_t off = 0; off < stride; ++off) {
                const std::int64_t r0 = base + off;
                const std::int64_t r1 = r0 + stride;
                const cxd b00 = rho(r0, c0), b01 = rho(r0, c1);
                const cxd b10 = rho(r1, c0), b11 = rho(r1, c1);
                // m B m^+
                const cxd t00 = m00 * b00 + m01 * b10, t01 = m00 * b01 + m01 * b11;
                const cxd t10 = m10 * b00 + m11 * b10, t11 = m10 * b01 + m11 * b11;
                out(r0, c0) += t00 * c00 + t01 * c01;
                out(r0, c1) += t00 * c10 + t01 * c11;
                out(r1, c0) += t10 * c00 + t11 * c01;
                out(r1, c1) += t10 * c10 + t11 * c11;
            }
        }
    });
}

} // namespace

DenseLindbladRhs::DenseLindbladRhs(OperatorSpec hamiltonian, const NoiseModel& noise)
    : hamiltonian_(std::move(hamiltonian)), jumps_(noise.jumps), quad_(ops::zero(noise.space)) {
    if (hamiltonian_.space != noise.space) {
        throw std::invalid_argument("DenseLindbladRhs: Hamiltonian and noise on different spaces");
    }
    for (const OperatorSpec& j : jumps_) {
        jump_adjoints_.push_back(j.adjoint());
        quad_ = quad_ + jump_adjoints_.back() * j;
    }
    quad_.simplify();
    if (!hamiltonian_.is_zero() && is_diagonal_operator(hamiltonian_)) {
        ham_diag_ = diagonal_vector(hamiltonian_);
    }
    if (!quad_.is_zero() && is_diagonal_operator(quad_)) {
        quad_diag_ = diagonal_vector(quad_);
    }
}

void DenseLindbladRhs::operator()(const Mat& rho, Mat& out) const {
    const Eigen::Index n = rho.rows();
    out.setZero(n, n);

    // Fused elementwise pass for diagonal H and J^+J:
    // -i (d_r - d_c) rho_rc - (q_r + q_c)/2 rho_rc.
    const bool diag_h = ham_diag_.size() == n;
    const bool diag_q = quad_diag_.size() == n;
    if (diag_h || diag_q) {
        parallel_for(n, [&](std::int64_t c) {
            for (Eigen::Index r = 0; r < n; ++r) {
                cxd g(0.0, 0.0);
                if (diag_h) g += cxd(0.0, -1.0) * (ham_diag_[r] - ham_diag_[c]);
                if (diag_q) g -= 0.5 * (quad_diag_[r] + std::conj(quad_diag_[c]));
                out(r, c) = g * rho(r, c);
            }
        });
    }
    if (!diag_h && !hamiltonian_.is_zero()) {
        out.noalias() += cxd(0.0, -1.0) * apply_to_columns(hamiltonian_, rho);
        out.noalias() -= cxd(0.0, -1.0) * right_multiply(rho, hamiltonian_); // H hermitian
    }
    if (!diag_q && !quad_.is_zero()) {
        out.noalias() -= 0.5 * apply_to_columns(quad_, rho);
        out.noalias() -= 0.5 * right_multiply(rho, quad_); // quad hermitian
    }

    for (std::size_t i = 0; i < jumps_.size(); ++i) {
        const OperatorSpec& j = jumps_[i];
        if (j.is_zero()) continue;
        if (j.space.kind == HilbertSpec::Kind::Qubits && j.num_terms() == 1 &&
            j.terms.front().factors.size() == 1) {
            const auto& term = j.terms.front();
            const Mat scaled = term.coeff * term.factors.front().matrix;
            add_single_site_sandwich(scaled, j.space.bit_of_site(term.factors.front().site), rho,
                                     out);
        } else {
            Mat jr = apply_to_columns(j, rho);
            out.noalias() += right_multiply(jr, jump_adjoints_[i]);
        }
    }
}

Mat lindblad_rhs(const DenseState& state, const OperatorSpec& hamiltonian,
                 const NoiseModel& noise) {
    if (state.rho.rows() != hamiltonian.space.dim) {
        throw std::invalid_argument("lindblad_rhs: density matrix dimension mismatch");
    }
    DenseLindbladRhs rhs(hamiltonian, noise);
    Mat out;
    rhs(state.rho, out);
    return out;
}

DenseState integrate_exact_segment(const DenseState& rho0, const OperatorSpec& hamiltonian,
                                   const NoiseModel& noise, double duration, double tol,
                                   std::int64_t dense_cap) {
    if (rho0.space.dim > dense_cap) {
        throw std::invalid_argument("integrate_exact: dimension exceeds the dense cap");
    }
    const Eigen::Index n = rho0.space.dim;
    DenseLindbladRhs rhs(hamiltonian, noise);

    DenseState state = rho0;
    Mat scratch(n, n);
    OdeRhs f = [&](double, const Vec& y, Vec& dydt) {
        Eigen::Map<const Mat> rho(y.data(), n, n);
        rhs(rho, scratch);
        dydt = Eigen::Map<const Vec>(scratch.data(), n * n);
    };
    Vec flat = Eigen::Map<const Vec>(state.rho.data(), n * n);
    AdaptiveRkOptions opts;
    opts.rtol = tol;
    opts.atol = tol * 1e-2;
    dopri5_integrate(f, flat, 0.0, duration, opts);
    state.rho = Eigen::Map<const Mat>(flat.data(), n, n);
    // The generator preserves Hermiticity; fold back rounding drift.
    state.rho = 0.5 * (state.rho + state.rho.adjoint()).eval();
    state.t += duration;
    return state;
}

DenseState integrate_exact(const DenseState& rho0, const GateSchedule& schedule,
                           const NoiseModel& noise, double tol, std::int64_t dense_cap) {
    DenseState state = rho0;
    for (const Segment& seg : schedule.segments) {
        state = integrate_exact_segment(state, seg.hamiltonian, noise, seg.duration, tol, dense_cap);
    }
    return state;
}

namespace {

/// Eigenvalues at the round-off noise floor get amplified by the square
/// root; clip them relative to the spectral scale.
Eigen::VectorXd clipped_sqrt(const Eigen::VectorXd& lam) {
    const double floor = 1e-12 * std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::VectorXd out = lam;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        out[i] = out[i] > floor ? std::sqrt(out[i]) : 0.0;
    }
    return out;
}

} // namespace

double fidelity_dense(const Mat& rho, const Mat& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        throw std::invalid_argument("fidelity_dense: shape mismatch");
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    Eigen::VectorXd lam = clipped_sqrt(es.eigenvalues());
    Mat sqrt_rho = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    Mat inner = sqrt_rho * sigma * sqrt_rho;
    Eigen::SelfAdjointEigenSolver<Mat> es2(0.5 * (inner + inner.adjoint()));
    return clipped_sqrt(es2.eigenvalues()).sum();
}

CornerBasis corner_from_dense(HilbertSpec h, const Mat& rho, double keep_tol) {
    if (rho.rows() != h.dim || rho.cols() != h.dim) {
        throw std::invalid_argument("corner_from_dense: shape mismatch");
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const Eigen::Index n = lam.size();
    Eigen::Index keep = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (lam[n - 1 - i] > keep_tol) ++keep;
    }
    keep = std::max<Eigen::Index>(keep, 1);
    CornerBasis basis;
    basis.space = h;
    basis.p.resize(keep);
    basis.C.resize(h.dim, keep);
    for (Eigen::Index k = 0; k < keep; ++k) {
        const double p = std::max(lam[n - 1 - k], 0.0);
        basis.p[k] = p;
        basis.C.col(k) = es.eigenvectors().col(n - 1 - k) * std::sqrt(p);
    }
    const double total = basis.p.sum();
    basis.p /= total;
    basis.C *= 1.0 / std::sqrt(total);
    return basis;
}

BenchmarkResult benchmark_pair(int L, double gamma_t_qft, double epsilon,
                               const StepConfig& base_cfg, double exact_tol) {
    using clock = std::chrono::steady_clock;
    GateSchedule schedule = qft_schedule(L, 1.0);
    const double gamma = gamma_t_qft / schedule.total_duration();
    HilbertSpec h = HilbertSpec::qubits(L);
    NoiseModel noise = local_decay(h, gamma);
    Vec psi0 = inverse_qft_ghz_state(L);

    StepConfig cfg = base_cfg;
    cfg.eps = epsilon;

    BenchmarkResult result;
    result.L = L;
    result.epsilon = epsilon;

    const auto t0 = clock::now();
    int max_m = 1;
    CornerBasis corner = evolve_schedule(from_pure_state(h, psi0), schedule, noise, cfg,
                                         [&](const CornerBasis& s) { max_m = std::max(max_m, s.rank()); });
    const auto t1 = clock::now();
    DenseState init{h, psi0 * psi0.adjoint(), 0.0};
    DenseState exact = integrate_exact(init, schedule, noise, exact_tol);
    const auto t2 = clock::now();

    result.t_corner_s = std::chrono::duration<double>(t1 - t0).count();
    result.t_exact_s = std::chrono::duration<double>(t2 - t1).count();
    result.fidelity_cross = fidelity_dense(to_density_matrix(corner), exact.rho);
    result.max_corner_dim = max_m;
    return result;
}

} // namespace cornersim
