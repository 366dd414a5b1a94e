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

#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "cornersim/integrator.hpp"
#include "cornersim/kerr_cat.hpp"
#include "test_util.hpp"

using namespace cornersim;

namespace {

LinearMap map_of(const Mat& a) {
    return [a](const Vec& x, Vec& y) { y = a * x; };
}

} // namespace

TEST_SUITE("integrator") {

TEST_CASE("krylov_expv reproduces dense expm on random non-normal generators") {
    std::mt19937_64 rng(17);
    for (int n : {5, 16, 40}) {
        Mat a = testutil::random_matrix(n, n, rng);
        a /= a.norm(); // O(1) spectral scale
        Vec v = testutil::random_vector(n, rng);
        KrylovOptions opts;
        opts.tol = 1e-12;
        for (double t : {0.3, 2.0, 7.5}) {
            Vec fast = krylov_expv(map_of(a), v, t, opts);
            Vec exact = (t * a).exp() * v;
            CHECK((fast - exact).norm() <= 1e-9 * exact.norm());
        }
    }
}

TEST_CASE("krylov_expv handles happy breakdown (invariant subspaces) exactly") {
    // A diagonal generator acting on a basis vector spans a 1-dim Krylov
    // space; the result must be the exact exponential.
    Mat a = Mat::Zero(8, 8);
    for (int i = 0; i < 8; ++i) a(i, i) = cxd(0.0, -double(i));
    Vec v = Vec::Zero(8);
    v[3] = 1.0;
    KrylovOptions opts;
    Vec w = krylov_expv(map_of(a), v, 1.7, opts);
    CHECK(std::abs(w[3] - std::polar(1.0, -3.0 * 1.7)) < 1e-13);
}

TEST_CASE("decaying two-level generator matches the closed-form norm") {
    // H_eff = -(i gamma/2)|up><up| shrinks the excited amplitude as
    // e^{-gamma tau / 2}; check at gamma tau = 0.2.
    const double gamma = 1.0, tau = 0.2;
    auto h = HilbertSpec::qubits(1);
    OperatorSpec h_eff = build_effective_hamiltonian(
        ops::zero(h), {ops::single_site(h, 1, ops::sigma_minus(), std::sqrt(gamma))});
    Mat c(2, 1);
    c << 1.0, 0.0;
    for (auto method : {SubstepMethod::Krylov, SubstepMethod::DenseExpm, SubstepMethod::Rk45}) {
        Mat out = coherent_substep(c, h_eff, tau, 1e-12, method);
        CHECK(out.col(0).norm() == doctest::Approx(std::exp(-0.1)).epsilon(1e-9));
        CHECK(std::abs(out(1, 0)) < 1e-14);
    }
}

TEST_CASE("zero generator leaves columns exactly unchanged") {
    std::mt19937_64 rng(4);
    auto h = HilbertSpec::qubits(2);
    Mat c = testutil::random_matrix(4, 3, rng);
    Mat out = coherent_substep(c, ops::zero(h), 0.7, 1e-10);
    CHECK((out - c).norm() == 0.0);
}

TEST_CASE("Kerr-cat effective Hamiltonian substep matches dense expm at reduced cutoff") {
    KerrParams params;
    params.n_ph = 10;
    auto [ham, noise] = kerr_model(params);
    OperatorSpec h_eff = build_effective_hamiltonian(ham, noise.jumps);
    const double dt = 0.01; // in 1/gamma units

    std::mt19937_64 rng(23);
    Mat c = testutil::random_matrix(11, 2, rng);
    c.col(0).normalize();
    c.col(1).normalize();

    Mat gen = cxd(0.0, -dt) * testutil::dense_of(h_eff);
    Mat exact = gen.exp() * c;
    Mat fast = coherent_substep(c, h_eff, dt, 1e-12, SubstepMethod::Krylov);
    CHECK((fast - exact).norm() <= 1e-8 * exact.norm());
}

TEST_CASE("column norms are non-increasing under a dissipative generator") {
    KerrParams params;
    params.n_ph = 12;
    auto [ham, noise] = kerr_model(params);
    OperatorSpec h_eff = build_effective_hamiltonian(ham, noise.jumps);
    std::mt19937_64 rng(31);
    Mat c = testutil::random_matrix(13, 4, rng);
    for (int k = 0; k < 4; ++k) c.col(k).normalize();
    Mat out = coherent_substep(c, h_eff, 0.02, 1e-10);
    for (int k = 0; k < 4; ++k) {
        CHECK(out.col(k).norm() <= c.col(k).norm() + 1e-10);
    }
}

TEST_CASE("Auto substep factors diagonal and single-hot-site generators exactly") {
    std::mt19937_64 rng(77);
    auto h = HilbertSpec::qubits(4);

    // purely diagonal generator (controlled-phase segments with decay)
    OperatorSpec diag(h);
    diag.add_term(cxd(0.4, -0.02), {LocalFactor{1, ops::pauli_z()}});
    diag.add_term(cxd(-0.25, 0.0),
                  {LocalFactor{2, ops::pauli_z()}, LocalFactor{4, ops::pauli_z()}});
    diag.add_term(cxd(0.0, -0.13), {LocalFactor{3, ops::up_projector()}});
    diag.add_term(cxd(-0.1, 0.0), {});

    // one non-diagonal site plus commuting diagonal rest (Hadamard segments)
    OperatorSpec hot(h);
    hot.add_term(cxd(-0.5, 0.0), {LocalFactor{2, ops::pauli_y()}});
    hot.add_term(cxd(0.0, -0.07), {LocalFactor{2, ops::up_projector()}});
    hot.add_term(cxd(0.0, -0.07), {LocalFactor{1, ops::up_projector()}});
    hot.add_term(cxd(0.0, -0.07),
                 {LocalFactor{3, ops::up_projector()}, LocalFactor{4, ops::pauli_z()}});

    for (const OperatorSpec& gen : {diag, hot}) {
        CoherentPropagator prop(gen, SubstepMethod::Auto, 1e-12);
        CHECK(prop.factored());
        Mat c = testutil::random_matrix(16, 3, rng);
        const double dt = 0.37;
        Mat fast = prop.advance(c, dt);
        Mat exact = (cxd(0.0, -dt) * testutil::dense_of(gen)).exp() * c;
        CHECK((fast - exact).norm() <= 1e-12 * exact.norm());
    }

    // an entangling non-diagonal term must fall back to Krylov
    OperatorSpec coupled(h);
    coupled.add_term(0.3, {LocalFactor{1, ops::pauli_x()}, LocalFactor{2, ops::pauli_x()}});
    CoherentPropagator fallback(coupled, SubstepMethod::Auto, 1e-11);
    CHECK_FALSE(fallback.factored());
    Mat c = testutil::random_matrix(16, 2, rng);
    Mat fast = fallback.advance(c, 0.21);
    Mat exact = (cxd(0.0, -0.21) * testutil::dense_of(coupled)).exp() * c;
    CHECK((fast - exact).norm() <= 1e-9 * exact.norm());
}

TEST_CASE("krylov_expv reports budget exhaustion instead of looping") {
    // n > krylov_dim so no happy breakdown; a long horizon at tight
    // tolerance needs many substeps, more than the budget allows.
    std::mt19937_64 rng(2);
    Mat a = testutil::random_matrix(40, 40, rng);
    a = cxd(0.0, -1.0) * (a + a.adjoint()); // bounded, oscillatory
    KrylovOptions opts;
    opts.krylov_dim = 8;
    opts.max_substeps = 2;
    opts.tol = 1e-12;
    Vec v = testutil::random_vector(40, rng);
    CHECK_THROWS_AS(krylov_expv(map_of(a), v, 5000.0, opts), IntegratorFailure);
}

TEST_CASE("dopri5 integrates a driven two-level closed form") {
    // y' = -i (omega/2) sigma_x y from |0>: population cos^2(omega t/2).
    const double omega = 1.3, t_final = 2.2;
    Mat sx = ops::pauli_x();
    OdeRhs rhs = [&](double, const Vec& y, Vec& dydt) {
        dydt = cxd(0.0, -omega / 2.0) * (sx * y);
    };
    Vec y(2);
    y << 1.0, 0.0;
    AdaptiveRkOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    AdaptiveRkStats stats;
    dopri5_integrate(rhs, y, 0.0, t_final, opts, &stats);
    CHECK(std::norm(y[0]) == doctest::Approx(std::pow(std::cos(omega * t_final / 2.0), 2))
                                 .epsilon(1e-8));
    CHECK(stats.steps > 0);
}

TEST_CASE("dopri5 halves its error at fifth order") {
    // Integrating over [0, T] at tolerance tol then tol/32 should reduce
    // the achieved error; sanity-check the controller is responsive.
    Mat a(2, 2);
    a << cxd(0, -1.0), cxd(0.2, 0), cxd(-0.2, 0), cxd(0, 0.7);
    Vec y0(2);
    y0 << 1.0, 0.5;
    auto run = [&](double tol) {
        Vec y = y0;
        AdaptiveRkOptions opts;
        opts.rtol = tol;
        opts.atol = tol;
        OdeRhs rhs = [&](double, const Vec& v, Vec& d) { d = a * v; };
        dopri5_integrate(rhs, y, 0.0, 3.0, opts);
        return (y - ((3.0 * a).exp() * y0).eval()).norm();
    };
    CHECK(run(1e-12) < run(1e-5));
    CHECK(run(1e-12) < 1e-9);
}

} // TEST_SUITE
