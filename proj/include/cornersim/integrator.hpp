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

#include <functional>
#include <stdexcept>
#include <string>

#include "cornersim/operator_spec.hpp"

namespace cornersim {

/// Raised when an adaptive integrator cannot meet its tolerance within
/// its step budget. Carries the attempted step statistics.
struct IntegratorFailure : std::runtime_error {
    explicit IntegratorFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix-free linear action y = A x.
using LinearMap = std::function<void(const Vec&, Vec&)>;

struct KrylovOptions {
    int krylov_dim = 24;      // Arnoldi subspace size m
    double tol = 1e-10;       // local error per unit time (relative scale)
    int max_substeps = 200000;
    int max_rejections = 12;
};

struct KrylovStats {
    long substeps = 0;
    long rejections = 0;
    long matvecs = 0;
    double min_tau = 0.0;
    double max_tau = 0.0;

    void merge(const KrylovStats& o);
};

/// w = exp(t A) v via Arnoldi projection with adaptive internal
/// sub-stepping and the Expokit-style local error estimate. Handles
/// non-normal A (stiff effective Hamiltonians) with no explicit
/// stability limit; happy breakdown makes small systems exact.
Vec krylov_expv(const LinearMap& A, const Vec& v, double t, const KrylovOptions& opts,
                KrylovStats* stats = nullptr);

/// RHS signature for the generic adaptive Runge-Kutta driver.
using OdeRhs = std::function<void(double t, const Vec& y, Vec& dydt)>;

struct AdaptiveRkOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double dt_initial = 0.0; // 0 = automatic
    long max_steps = 20000000;
};

struct AdaptiveRkStats {
    long steps = 0;
    long rejected = 0;
    double min_dt = 0.0;
    double max_dt = 0.0;
};

/// Integrates y' = f(t, y) from t0 to t1 in place with the Dormand-Prince
/// 5(4) embedded pair and PI-free standard step control.
void dopri5_integrate(const OdeRhs& f, Vec& y, double t0, double t1,
                      const AdaptiveRkOptions& opts, AdaptiveRkStats* stats = nullptr);

/// Propagator for one no-jump substep: advances the corner columns by
/// exp(-i dt H_eff). Method choices trade generality for speed:
///  - Auto: exact factored exponential when the generator is diagonal or
///    a single non-diagonal site tensored with a commuting diagonal rest
///    (every QFT segment with local decay or dephasing); Krylov
///    otherwise;
///  - Krylov: matrix-free, adaptive, stiffness-capable;
///  - DenseExpm: exact cached exponential, small dimensions only;
///  - Rk45: explicit adaptive Runge-Kutta (not suitable for stiff runs).
enum class SubstepMethod { Auto, Krylov, DenseExpm, Rk45 };

class CoherentPropagator {
  public:
    CoherentPropagator(OperatorSpec h_eff, SubstepMethod method, double tol, int krylov_dim = 24);

    /// Evolves every column of C by exp(-i dt H_eff); columns are
    /// independent and processed in parallel.
    Mat advance(const Mat& C, double dt) const;

    const KrylovStats& stats() const { return stats_; }
    const OperatorSpec& generator() const { return h_eff_; }
    /// True when the Auto analysis found an exact factored form.
    bool factored() const { return factored_valid_; }

  private:
    void analyze_structure();

    OperatorSpec h_eff_;
    SubstepMethod method_;
    double tol_;
    int krylov_dim_;
    mutable KrylovStats stats_;
    // DenseExpm cache, keyed by the last dt.
    mutable Mat cached_expm_;
    mutable double cached_dt_ = -1.0;
    // Factored-exponential form: generator = local(site) + diag, with the
    // two parts acting on disjoint tensor factors.
    bool factored_valid_ = false;
    int factored_site_ = 0; // 0 = no local block (purely diagonal)
    Mat factored_local_;
    Vec factored_diag_;
    mutable double factored_dt_ = -1.0;
    mutable Mat factored_local_exp_;
    mutable Vec factored_diag_exp_;
};

} // namespace cornersim
