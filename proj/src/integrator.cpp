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

#include "cornersim/integrator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "cornersim/parallel.hpp"

namespace cornersim {

void KrylovStats::merge(const KrylovStats& o) {
    if (o.substeps == 0) return;
    if (substeps == 0) {
        *this = o;
        return;
    }
    substeps += o.substeps;
    rejections += o.rejections;
    matvecs += o.matvecs;
    min_tau = std::min(min_tau, o.min_tau);
    max_tau = std::max(max_tau, o.max_tau);
}

namespace {

double round_step(double t) {
    if (t <= 0.0 || !std::isfinite(t)) return t;
    const double s = std::pow(10.0, std::floor(std::log10(t)) - 1.0);
    return std::ceil(t / s) * s;
}

} // namespace

Vec krylov_expv(const LinearMap& A, const Vec& v, double t, const KrylovOptions& opts,
                KrylovStats* stats) {
    const Eigen::Index n = v.size();
    KrylovStats local;
    if (t == 0.0 || n == 0) {
        if (stats) stats->merge(local);
        return v;
    }
    const int m = std::max(1, std::min<int>(opts.krylov_dim, static_cast<int>(n)));
    const double btol = 1e-7;
    const double gamma = 0.9;
    const double delta = 1.2;

    Vec w = v;
    double beta = w.norm();
    if (beta == 0.0) return w;

    // Crude generator-norm estimate for the first step-size guess only;
    // the error controller corrects bad guesses.
    Vec tmp(n);
    A(w, tmp);
    local.matvecs++;
    double anorm = std::max(tmp.norm() / beta, 1e-16);

    const double xm0 = 1.0 / m;
    const double fact =
        std::pow((m + 1.0) / std::exp(1.0), m + 1.0) * std::sqrt(2.0 * M_PI * (m + 1.0));
    double t_new = (1.0 / anorm) * std::pow((fact * opts.tol) / (4.0 * beta * anorm), xm0);
    t_new = round_step(t_new);

    Mat V(n, m + 1);
    Mat H = Mat::Zero(m + 2, m + 2);
    double t_now = 0.0;
    const double t_out = t; // durations are positive in this codebase

    while (t_now < t_out) {
        if (local.substeps >= opts.max_substeps) {
            throw IntegratorFailure(
                "krylov_expv: substep budget exhausted (substeps=" + std::to_string(local.substeps) +
                ", rejections=" + std::to_string(local.rejections) +
                ", t_now=" + std::to_string(t_now) + " of " + std::to_string(t_out) + ")");
        }
        double t_step = std::min(t_out - t_now, t_new);
        H.setZero();
        V.col(0) = w / beta;
        int mb = m;
        int k1 = 2;
        for (int j = 0; j < m; ++j) {
            Vec p(n);
            A(V.col(j), p);
            local.matvecs++;
            for (int i = 0; i <= j; ++i) {
                H(i, j) = V.col(i).dot(p);
                p -= H(i, j) * V.col(i);
            }
            const double s = p.norm();
            if (s < btol) { // happy breakdown: the Krylov space is invariant
                k1 = 0;
                mb = j + 1;
                t_step = t_out - t_now;
                break;
            }
            H(j + 1, j) = s;
            V.col(j + 1) = p / s;
        }
        double avnorm = 0.0;
        if (k1 != 0) {
            H(m + 1, m) = 1.0;
            A(V.col(m), tmp);
            local.matvecs++;
            avnorm = tmp.norm();
        }

        int ireject = 0;
        double err_loc = btol;
        double xm = xm0;
        Mat F;
        while (true) {
            const int mx = mb + k1;
            F = (t_step * H.topLeftCorner(mx, mx)).exp();
            if (k1 == 0) {
                err_loc = btol;
                break;
            }
            const double phi1 = std::abs(beta * F(m, 0));
            const double phi2 = std::abs(beta * F(m + 1, 0) * avnorm);
            if (phi1 > 10.0 * phi2) {
                err_loc = phi2;
                xm = 1.0 / m;
            } else if (phi1 > phi2) {
                err_loc = (phi1 * phi2) / (phi1 - phi2);
                xm = 1.0 / m;
            } else {
                err_loc = phi1;
                xm = 1.0 / (m - 1);
            }
            if (err_loc <= delta * t_step * opts.tol * std::max(beta, 1.0)) break;
            t_step = gamma * t_step * std::pow(t_step * opts.tol * std::max(beta, 1.0) / err_loc, xm);
            t_step = round_step(t_step);
            local.rejections++;
            if (++ireject > opts.max_rejections) {
                throw IntegratorFailure(
                    "krylov_expv: tolerance unreachable (rejections=" +
                    std::to_string(local.rejections) + ", t_step=" + std::to_string(t_step) +
                    ", err_loc=" + std::to_string(err_loc) + ")");
            }
        }

        const int mx = mb + std::max(0, k1 - 1);
        w = V.leftCols(mx) * (beta * F.col(0).head(mx));
        beta = w.norm();
        if (!std::isfinite(beta)) {
            throw IntegratorFailure("krylov_expv: non-finite result (overflowing generator?) at t=" +
                                    std::to_string(t_now) + ", t_step=" + std::to_string(t_step));
        }

        t_now += t_step;
        local.substeps++;
        local.min_tau = local.substeps == 1 ? t_step : std::min(local.min_tau, t_step);
        local.max_tau = std::max(local.max_tau, t_step);
        t_new = gamma * t_step * std::pow(t_step * opts.tol * std::max(beta, 1.0) / err_loc, xm);
        t_new = round_step(t_new);
    }
    if (stats) stats->merge(local);
    return w;
}

namespace dp5 {
// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
} // namespace dp5

void dopri5_integrate(const OdeRhs& f, Vec& y, double t0, double t1,
                      const AdaptiveRkOptions& opts, AdaptiveRkStats* stats) {
    using namespace dp5;
    const double total = t1 - t0;
    if (total <= 0.0) return;
    const Eigen::Index n = y.size();
    Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n), err(n);

    double t = t0;
    f(t, y, k1);
    double h = opts.dt_initial;
    if (h <= 0.0) {
        const double d0 = y.norm();
        const double d1 = k1.norm();
        h = (d1 > 1e-12) ? 0.01 * std::max(d0, 1.0) / d1 : total / 100.0;
        h = std::min(h, total);
    }

    AdaptiveRkStats local;
    bool fsal_valid = true;
    while (t < t1) {
        if (local.steps + local.rejected > opts.max_steps) {
            throw IntegratorFailure("dopri5: step budget exhausted at t=" + std::to_string(t) +
                                    " (accepted=" + std::to_string(local.steps) +
                                    ", rejected=" + std::to_string(local.rejected) + ")");
        }
        h = std::min(h, t1 - t);
        if (!fsal_valid) f(t, y, k1);

        ytmp = y + h * (a21 * k1);
        f(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        f(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        f(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(t + h, ytmp, k6);
        y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        f(t + h, y5, k7);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err_norm = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double scale =
                opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            const double r = std::abs(err[i]) / scale;
            err_norm += r * r;
        }
        err_norm = std::sqrt(err_norm / static_cast<double>(n));

        if (err_norm <= 1.0) {
            t += h;
            y.swap(y5);
            k1.swap(k7); // first-same-as-last
            fsal_valid = true;
            local.steps++;
            local.min_dt = local.steps == 1 ? h : std::min(local.min_dt, h);
            local.max_dt = std::max(local.max_dt, h);
        } else {
            local.rejected++;
            fsal_valid = true; // k1 still holds f(t, y)
        }
        const double factor =
            std::clamp(0.9 * std::pow(std::max(err_norm, 1e-12), -0.2), 0.2, 5.0);
        h *= factor;
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            throw IntegratorFailure("dopri5: step size underflow at t=" + std::to_string(t));
        }
    }
    if (stats) *stats = local;
}

namespace {

bool is_diagonal_matrix(const Mat& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (r != c && m(r, c) != cxd(0.0, 0.0)) return false;
        }
    }
    return true;
}

} // namespace

CoherentPropagator::CoherentPropagator(OperatorSpec h_eff, SubstepMethod method, double tol,
                                       int krylov_dim)
    : h_eff_(std::move(h_eff)), method_(method), tol_(tol), krylov_dim_(krylov_dim) {
    if (method_ == SubstepMethod::DenseExpm && h_eff_.space.dim > 4096) {
        throw std::invalid_argument("CoherentPropagator: DenseExpm restricted to N <= 4096");
    }
    if (method_ == SubstepMethod::Auto) analyze_structure();
}

void CoherentPropagator::analyze_structure() {
    const HilbertSpec& space = h_eff_.space;
    if (space.kind == HilbertSpec::Kind::Boson) {
        // Single mode: the whole generator is one local block.
        factored_site_ = 1;
        factored_local_ = Mat::Zero(space.dim, space.dim);
        for (const auto& term : h_eff_.terms) {
            if (term.factors.empty()) {
                factored_local_ += term.coeff * Mat::Identity(space.dim, space.dim);
            } else {
                factored_local_ += term.coeff * term.factors.front().matrix;
            }
        }
        factored_diag_ = Vec::Zero(space.dim);
        factored_valid_ = true;
        return;
    }

    // Find the sites carrying non-diagonal factors; the factored form
    // needs all of them on one site, in single-factor terms, with every
    // other term diagonal and free of that site.
    int hot_site = 0;
    for (const auto& term : h_eff_.terms) {
        for (const auto& f : term.factors) {
            if (is_diagonal_matrix(f.matrix)) continue;
            if (term.factors.size() != 1) return;              // entangling non-diagonal term
            if (hot_site != 0 && hot_site != f.site) return;   // two distinct hot sites
            hot_site = f.site;
        }
    }
    Mat local = Mat::Zero(2, 2);
    Vec diag = Vec::Zero(space.dim);
    for (const auto& term : h_eff_.terms) {
        if (term.factors.size() == 1 && term.factors.front().site == hot_site && hot_site != 0) {
            local += term.coeff * term.factors.front().matrix;
            continue;
        }
        for (const auto& f : term.factors) {
            if (f.site == hot_site) return; // diagonal factor colliding with the local block
        }
        // accumulate coeff * prod_f diag-entry into the diagonal vector
        for (std::int64_t n = 0; n < space.dim; ++n) {
            cxd v = term.coeff;
            for (const auto& f : term.factors) {
                v *= f.matrix(((n >> space.bit_of_site(f.site)) & 1), ((n >> space.bit_of_site(f.site)) & 1));
            }
            diag[n] += v;
        }
    }
    factored_site_ = hot_site;
    factored_local_ = std::move(local);
    factored_diag_ = std::move(diag);
    factored_valid_ = true;
}

Mat CoherentPropagator::advance(const Mat& C, double dt) const {
    if (C.rows() != h_eff_.space.dim) {
        throw std::invalid_argument("CoherentPropagator: column length mismatch");
    }
    if (dt == 0.0 || h_eff_.is_zero()) return C;

    if (method_ == SubstepMethod::Auto && factored_valid_) {
        if (factored_dt_ != dt) {
            if (factored_site_ != 0) {
                Mat gen = cxd(0.0, -dt) * factored_local_;
                factored_local_exp_ = gen.exp();
            }
            factored_diag_exp_ = (cxd(0.0, -dt) * factored_diag_).array().exp();
            factored_dt_ = dt;
        }
        Mat out = C;
        if (h_eff_.space.kind == HilbertSpec::Kind::Boson) {
            return factored_local_exp_ * out;
        }
        for (Eigen::Index col = 0; col < out.cols(); ++col) {
            out.col(col).array() *= factored_diag_exp_.array();
        }
        if (factored_site_ != 0) {
            const int bit = h_eff_.space.bit_of_site(factored_site_);
            const std::int64_t stride = std::int64_t{1} << bit;
            const cxd m00 = factored_local_exp_(0, 0), m01 = factored_local_exp_(0, 1);
            const cxd m10 = factored_local_exp_(1, 0), m11 = factored_local_exp_(1, 1);
            for (Eigen::Index col = 0; col < out.cols(); ++col) {
                cxd* a = out.col(col).data();
                for (std::int64_t base = 0; base < out.rows(); base += 2 * stride) {
                    for (std::int64_t off = 0; off < stride; ++off) {
                        const std::int64_t i0 = base + off;
                        const std::int64_t i1 = i0 + stride;
                        const cxd v0 = a[i0];
                        const cxd v1 = a[i1];
                        a[i0] = m00 * v0 + m01 * v1;
                        a[i1] = m10 * v0 + m11 * v1;
                    }
                }
            }
        }
        return out;
    }

    if (method_ == SubstepMethod::DenseExpm) {
        if (cached_dt_ != dt) {
            Mat gen = cxd(0.0, -dt) * h_eff_.to_dense();
            cached_expm_ = gen.exp();
            cached_dt_ = dt;
        }
        return cached_expm_ * C;
    }

    Mat out(C.rows(), C.cols());
    std::mutex stats_mutex;
    if (method_ == SubstepMethod::Krylov || method_ == SubstepMethod::Auto) {
        KrylovOptions kopts;
        kopts.krylov_dim = krylov_dim_;
        kopts.tol = tol_;
        LinearMap gen = [this](const Vec& x, Vec& yv) {
            Vec scratch;
            yv.setZero(x.size());
            apply_operator_add(h_eff_, x, yv, scratch);
            yv *= cxd(0.0, -1.0);
        };
        parallel_for(C.cols(), [&](std::int64_t mcol) {
            KrylovStats st;
            Vec col = C.col(mcol);
            out.col(mcol) = krylov_expv(gen, col, dt, kopts, &st);
            std::scoped_lock lock(stats_mutex);
            stats_.merge(st);
        });
        return out;
    }

    // Rk45 path: y' = -i H_eff y per column.
    AdaptiveRkOptions ropts;
    ropts.rtol = tol_;
    ropts.atol = tol_ * 1e-2;
    OdeRhs rhs = [this](double, const Vec& yv, Vec& dydt) {
        Vec scratch;
        dydt.setZero(yv.size());
        apply_operator_add(h_eff_, yv, dydt, scratch);
        dydt *= cxd(0.0, -1.0);
    };
    parallel_for(C.cols(), [&](std::int64_t mcol) {
        Vec col = C.col(mcol);
        dopri5_integrate(rhs, col, 0.0, dt, ropts);
        out.col(mcol) = col;
    });
    return out;
}

} // namespace cornersim
