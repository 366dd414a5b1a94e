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

#include "cornersim/corner.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <chrono>
#include <random>
#include <cstdio>
#include <cstdlib>

#include "cornersim/parallel.hpp"

namespace cornersim {

void StepConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("StepConfig: dt must be positive");
    if (!(eps > 0.0) || eps >= 1.0) throw std::invalid_argument("StepConfig: need 0 < eps < 1");
    if (eps_horizon < 0.0) throw std::invalid_argument("StepConfig: eps_horizon must be >= 0");
    if (p_floor < 0.0) throw std::invalid_argument("StepConfig: p_floor must be >= 0");
    if (m_max < 0) throw std::invalid_argument("StepConfig: m_max must be >= 0");
    if (sketch_min < 0) throw std::invalid_argument("StepConfig: sketch_min must be >= 0");
    if (!(ode_tol > 0.0)) throw std::invalid_argument("StepConfig: ode_tol must be positive");
    if (observer_stride < 1) throw std::invalid_argument("StepConfig: observer_stride must be >= 1");
}

double StepConfig::step_eps(double step_dt) const {
    if (eps_horizon <= 0.0) return eps;
    return eps * std::min(1.0, step_dt / eps_horizon);
}

namespace {

/// Shared truncation policy: given an ascending spectrum, the smallest
/// leading set whose discarded weight fits the budget, capped at m_max.
struct Selection {
    Eigen::Index keep = 1;
    double total = 0.0; // weight above the noise floor
    double kept = 0.0;
    bool unreachable = false;
};

Selection select_spectrum(const Eigen::VectorXd& lam_ascending, const StepConfig& cfg) {
    const Eigen::Index w = lam_ascending.size();
    const double floor = std::max(0.0, cfg.p_floor);
    Selection sel;
    sel.total = 0.0;
    for (Eigen::Index i = 0; i < w; ++i) {
        if (lam_ascending[i] > floor) sel.total += lam_ascending[i];
    }
    if (sel.total <= 0.0) {
        throw NumericalFailure("gram_truncate: transition basis has vanishing weight");
    }
    Eigen::Index keep = 0;
    double kept = 0.0;
    for (Eigen::Index i = w - 1; i >= 0; --i) {
        if (lam_ascending[i] <= floor) break;
        ++keep;
        kept += lam_ascending[i];
        if (sel.total - kept <= cfg.eps * sel.total) break;
    }
    keep = std::max<Eigen::Index>(keep, 1);
    if (cfg.m_max > 0 && keep > cfg.m_max) {
        keep = cfg.m_max;
        kept = 0.0;
        for (Eigen::Index i = 0; i < keep; ++i) kept += lam_ascending[w - 1 - i];
        sel.unreachable = (sel.total - kept) > cfg.eps * sel.total;
    }
    sel.keep = keep;
    sel.kept = kept;
    return sel;
}

/// Rotates a column so its largest-magnitude amplitude is real positive.
/// Ties resolve to the lowest index; reproducible corner bases.
void phase_fix_column(Eigen::Ref<Vec> col) {
    Eigen::Index imax = 0;
    double best = 0.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
        const double a = std::norm(col[i]);
        if (a > best) {
            best = a;
            imax = i;
        }
    }
    if (best == 0.0) return;
    const cxd z = col[imax];
    col *= std::conj(z) / std::abs(z);
}

} // namespace

CornerBasis from_pure_state(HilbertSpec h, const Vec& psi) {
    if (psi.size() != h.dim) {
        throw std::invalid_argument("from_pure_state: vector length does not match the space");
    }
    const double norm = psi.norm();
    if (norm <= 0.0 || !std::isfinite(norm)) {
        throw std::invalid_argument("from_pure_state: state vector must be nonzero");
    }
    CornerBasis basis;
    basis.space = h;
    basis.C = psi / norm;
    phase_fix_column(basis.C.col(0));
    basis.p = Eigen::VectorXd::Ones(1);
    basis.t = 0.0;
    return basis;
}

Mat to_density_matrix(const CornerBasis& basis, std::int64_t dense_cap) {
    if (basis.space.dim > dense_cap) {
        throw std::invalid_argument("to_density_matrix: dimension exceeds the dense cap");
    }
    return basis.C * basis.C.adjoint();
}

Mat coherent_substep(const Mat& C, const OperatorSpec& h_eff, double dt, double tol,
                     SubstepMethod method) {
    CoherentPropagator prop(h_eff, method, tol);
    return prop.advance(C, dt);
}

Mat expand_transition_basis(const Mat& coherent_block, const Mat& pre_block,
                            const NoiseModel& noise, double dt, double prune_floor,
                            double* pruned_weight) {
    if (coherent_block.rows() != pre_block.rows() || coherent_block.cols() != pre_block.cols()) {
        throw std::invalid_argument("expand_transition_basis: block shape mismatch");
    }
    if (pre_block.rows() != noise.space.dim) {
        throw std::invalid_argument("expand_transition_basis: dimension mismatch with noise model");
    }
    const Eigen::Index m = pre_block.cols();
    const int d = noise.channel_count();
    const double sdt = std::sqrt(dt);

    Mat T(pre_block.rows(), m * (d + 1));
    T.leftCols(m) = coherent_block;
    for (int i = 0; i < d; ++i) {
        T.middleCols(m * (i + 1), m) = sdt * apply_to_columns(noise.jumps[i], pre_block);
    }
    double pruned = 0.0;
    if (prune_floor > 0.0 && d > 0) {
        Eigen::Index keep = m;
        for (Eigen::Index c = m; c < T.cols(); ++c) {
            const double w = T.col(c).squaredNorm();
            if (w < prune_floor) {
                pruned += w;
            } else {
                if (keep != c) T.col(keep) = T.col(c);
                ++keep;
            }
        }
        T.conservativeResize(Eigen::NoChange, keep);
    }
    if (pruned_weight) *pruned_weight = pruned;
    return T;
}

GramResult gram_truncate(const Mat& T, const StepConfig& cfg) {
    cfg.validate();
    if (!T.allFinite()) {
        throw NumericalFailure("gram_truncate: transition basis contains non-finite entries");
    }
    const Eigen::Index w = T.cols();
    Mat sigma = Mat::Zero(w, w);
    sigma.selfadjointView<Eigen::Lower>().rankUpdate(T.adjoint()); // syrk: half the flops
    sigma.triangularView<Eigen::StrictlyUpper>() = sigma.adjoint();

    Eigen::SelfAdjointEigenSolver<Mat> es(sigma);
    if (es.info() != Eigen::Success) {
        throw NumericalFailure("gram_truncate: eigendecomposition failed");
    }
    // Ascending from Eigen; traverse from the back for descending order.
    const Eigen::VectorXd& lam = es.eigenvalues();
    Selection sel = select_spectrum(lam, cfg);

    GramResult res;
    res.total_weight = sel.total;
    res.discarded = std::max(0.0, sel.total - sel.kept);
    res.trace_defect = std::abs(sigma.trace().real() - 1.0);
    res.eps_unreachable = sel.unreachable;

    Mat vecs(w, sel.keep);
    res.p.resize(sel.keep);
    for (Eigen::Index k = 0; k < sel.keep; ++k) {
        vecs.col(k) = es.eigenvectors().col(w - 1 - k);
        res.p[k] = lam[w - 1 - k];
    }
    res.C.noalias() = T * vecs; // column k has squared norm p_k

    // Renormalize the retained trace to one.
    const double scale = res.p.sum();
    res.p /= scale;
    res.C *= 1.0 / std::sqrt(scale);
    for (Eigen::Index k = 0; k < sel.keep; ++k) phase_fix_column(res.C.col(k));
    return res;
}

GramResult randomized_truncate(const Mat& T, const StepConfig& cfg, Eigen::Index s_start,
                               double allowance, std::uint64_t seed, double* residual_out,
                               Eigen::Index* sketch_used) {
    // Halko-style range finder on the whole transition basis: the
    // top spectrum of T T^+ survives projection onto a sketched
    // orthonormal range Q, and sigma shrinks to the s x s Gram of Q^+ T.
    // The uncaptured weight is measured exactly and charged like any
    // other truncation.
    cfg.validate();
    if (!T.allFinite()) {
        throw NumericalFailure("randomized_truncate: non-finite transition basis");
    }
    const Eigen::Index n = T.rows();
    const Eigen::Index w = T.cols();
    const double total_sq = T.squaredNorm();
    if (total_sq <= 0.0) {
        throw NumericalFailure("randomized_truncate: transition basis has vanishing weight");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;

    Mat q, projected;
    double residual = total_sq;
    Eigen::Index s = std::min(w, std::max<Eigen::Index>(s_start, 8));
    while (true) {
        Mat omega(w, s);
        for (Eigen::Index c = 0; c < s; ++c) {
            for (Eigen::Index r = 0; r < w; ++r) omega(r, c) = cxd(dist(rng), dist(rng));
        }
        q.noalias() = T * omega; // N x s sample of the range
        // CholeskyQR2: two rounds keep orthogonality at round-off level.
        bool chol_ok = true;
        for (int round = 0; round < 2 && chol_ok; ++round) {
            Mat g = Mat::Zero(s, s);
            g.selfadjointView<Eigen::Lower>().rankUpdate(q.adjoint());
            g.triangularView<Eigen::StrictlyUpper>() = g.adjoint();
            Eigen::LLT<Mat> llt(g);
            if (llt.info() != Eigen::Success) {
                chol_ok = false;
                break;
            }
            llt.matrixU().transpose().conjugate().solveInPlace<Eigen::OnTheRight>(q);
        }
        if (!chol_ok) {
            Eigen::HouseholderQR<Mat> qr(q);
            q = qr.householderQ() * Mat::Identity(n, s);
        }
        projected.noalias() = q.adjoint() * T; // s x w
        residual = std::max(0.0, total_sq - projected.squaredNorm());
        if (residual <= allowance || s >= w) break;
        s = std::min(w, 2 * s);
    }
    if (residual_out) *residual_out = residual;
    if (sketch_used) *sketch_used = s;

    Mat gram = Mat::Zero(s, s);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(projected);
    gram.triangularView<Eigen::StrictlyUpper>() = gram.adjoint();
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    if (es.info() != Eigen::Success) {
        throw NumericalFailure("randomized_truncate: eigendecomposition failed");
    }
    StepConfig sel_cfg = cfg;
    sel_cfg.eps = std::max(cfg.eps - residual, 0.1 * cfg.eps);
    Selection sel = select_spectrum(es.eigenvalues(), sel_cfg);

    GramResult res;
    res.total_weight = sel.total;
    res.discarded = std::max(0.0, sel.total - sel.kept);
    res.trace_defect = std::abs(gram.trace().real() + residual - 1.0);
    res.eps_unreachable = sel.unreachable;
    Mat weighted(s, sel.keep);
    res.p.resize(sel.keep);
    for (Eigen::Index k = 0; k < sel.keep; ++k) {
        const double lam = std::max(es.eigenvalues()[s - 1 - k], 0.0);
        weighted.col(k) = es.eigenvectors().col(s - 1 - k) * std::sqrt(lam);
        res.p[k] = lam;
    }
    res.C.noalias() = q * weighted;
    const double scale = res.p.sum();
    res.p /= scale;
    res.C *= 1.0 / std::sqrt(scale);
    for (Eigen::Index k = 0; k < sel.keep; ++k) phase_fix_column(res.C.col(k));
    return res;
}

CornerStepper::CornerStepper(const OperatorSpec& hamiltonian, const NoiseModel& noise,
                             StepConfig cfg)
    : cfg_(cfg),
      noise_(noise),
      propagator_(build_effective_hamiltonian(hamiltonian, noise.jumps), cfg.substep, cfg.ode_tol,
                  cfg.krylov_dim) {
    cfg_.validate();
    if (hamiltonian.space != noise.space) {
        throw std::invalid_argument("CornerStepper: Hamiltonian and noise on different spaces");
    }
}

CornerBasis CornerStepper::step(const CornerBasis& state, double dt) const {
    if (state.space != noise_.space) {
        throw std::invalid_argument("CornerStepper: state on a different space");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("CornerStepper: dt must be positive");

    const bool trace = std::getenv("CORNERSIM_TRACE") != nullptr;
    auto now = [] { return std::chrono::steady_clock::now(); };
    auto ms = [](auto a, auto b) { return std::chrono::duration<double, std::milli>(b - a).count(); };
    const auto t0 = now();

    const double eps_eff = cfg_.step_eps(dt);
    const Mat coherent = propagator_.advance(state.C, dt);
    const auto t1 = now();
    double prune_floor = 0.0;
    if (cfg_.jump_col_floor > 0.0 && noise_.channel_count() > 0) {
        const double cols = static_cast<double>(state.rank() * noise_.channel_count());
        prune_floor = cfg_.jump_col_floor * eps_eff / cols;
    }
    double pruned = 0.0;
    Mat T = expand_transition_basis(coherent, state.C, noise_, dt, prune_floor, &pruned);
    const auto t2 = now();
    const Eigen::Index m_in = state.rank();
    StepConfig gram_cfg = cfg_;
    // pruning already spent part of this step's budget
    gram_cfg.eps = std::max(eps_eff - pruned, 0.1 * eps_eff);
    gram_cfg.eps_horizon = 0.0;

    GramResult res;
    Eigen::Index sketch_used = 0;
    const Eigen::Index s_start = std::max<Eigen::Index>(
        {Eigen::Index(cfg_.sketch_min), m_in + cfg_.sketch_min / 2, sketch_hint_});
    if (cfg_.sketch_min > 0 && T.cols() > s_start + s_start / 2) {
        // deterministic per-step seed so reruns are bit-identical
        std::uint64_t seed = 0x9e3779b97f4a7c15ull;
        const std::uint64_t tbits = std::bit_cast<std::uint64_t>(state.t);
        seed ^= tbits + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
        seed ^= static_cast<std::uint64_t>(m_in) * 0xff51afd7ed558ccdull;
        double residual = 0.0;
        const double allowance = std::max(0.5 * gram_cfg.eps, 0.25 * last_discard_);
        res = randomized_truncate(T, gram_cfg, s_start, allowance, seed, &residual, &sketch_used);
        pruned += residual;
        // remember the sketch size that worked; decay it when oversized
        sketch_hint_ = residual * 8.0 < allowance ? sketch_used - sketch_used / 8 : sketch_used;
    } else {
        res = gram_truncate(T, gram_cfg);
    }
    if (trace) {
        static long trace_count = 0;
        if (trace_count++ % 50 == 0) {
            const auto t4 = now();
            std::fprintf(stderr,
                         "[trace] t=%.3f M=%d W=%ld s=%ld pruned=%.2e | substep %.0fms expand "
                         "%.0fms truncate %.0fms\n",
                         state.t, state.rank(), long(T.cols()), long(sketch_used), pruned,
                         ms(t0, t1), ms(t1, t2), ms(t2, t4));
        }
    }

    CornerBasis out;
    out.space = state.space;
    out.C = std::move(res.C);
    out.p = std::move(res.p);
    out.t = state.t + dt;
    out.eps_budget = cfg_.eps;
    out.eps_step = (res.discarded + pruned) / (res.total_weight + pruned);
    out.eps_total = state.eps_total + out.eps_step;
    out.trace_drift = state.trace_drift + res.trace_defect;
    out.eps_unreachable = state.eps_unreachable || res.eps_unreachable;
    last_discard_ = res.discarded / res.total_weight;
    return out;
}

CornerBasis step(const CornerBasis& state, const OperatorSpec& hamiltonian,
                 const NoiseModel& noise, const StepConfig& cfg) {
    return CornerStepper(hamiltonian, noise, cfg).step(state);
}

CornerBasis evolve_schedule(CornerBasis state, const GateSchedule& schedule,
                            const NoiseModel& noise, const StepConfig& cfg,
                            const StepObserver& observer) {
    cfg.validate();
    if (schedule.empty()) {
        throw std::invalid_argument("evolve_schedule: schedule must not be empty");
    }
    // eps is a whole-run budget for schedule evolution; spread it over
    // the total duration unless the caller set a horizon explicitly.
    if (cfg.eps_horizon <= 0.0) {
        StepConfig amortized = cfg;
        amortized.eps_horizon = schedule.total_duration();
        return evolve_schedule(std::move(state), schedule, noise, amortized, observer);
    }
    if (observer) observer(state);
    long step_index = 0;
    for (const Segment& seg : schedule.segments) {
        if (!(seg.duration > 0.0)) {
            throw std::invalid_argument("evolve_schedule: negative or zero segment duration");
        }
        CornerStepper stepper(seg.hamiltonian, noise, cfg);
        const long nsteps = std::max<long>(1, static_cast<long>(std::ceil(seg.duration / cfg.dt - 1e-9)));
        for (long i = 0; i < nsteps; ++i) {
            const double dt =
                (i + 1 == nsteps) ? seg.duration - static_cast<double>(i) * cfg.dt : cfg.dt;
            state = stepper.step(state, dt);
            ++step_index;
            const bool boundary = (i + 1 == nsteps);
            if (observer && (boundary || step_index % cfg.observer_stride == 0)) observer(state);
        }
    }
    return state;
}

} // namespace cornersim
