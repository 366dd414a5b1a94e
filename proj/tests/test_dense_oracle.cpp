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

#include "cornersim/dense_oracle.hpp"
#include "test_util.hpp"

using namespace cornersim;

TEST_SUITE("dense_oracle") {

TEST_CASE("lindblad_rhs vanishes with no generator and on steady states") {
    auto h = HilbertSpec::qubits(2);
    std::mt19937_64 rng(31);
    Mat rho = testutil::random_density(4, 3, rng);
    Mat rhs = lindblad_rhs(DenseState{h, rho, 0.0}, ops::zero(h), NoiseModel::none(h));
    CHECK(rhs.norm() == 0.0);

    // |down><down| is stationary under single-qubit decay
    auto h1 = HilbertSpec::qubits(1);
    Mat dark = Mat::Zero(2, 2);
    dark(1, 1) = 1.0;
    Mat rhs2 = lindblad_rhs(DenseState{h1, dark, 0.0}, ops::zero(h1), local_decay(h1, 0.7));
    CHECK(rhs2.norm() < 1e-15);
}

TEST_CASE("lindblad_rhs is traceless and matches the dense superoperator formula") {
    std::mt19937_64 rng(32);
    auto h = HilbertSpec::qubits(2);
    NoiseModel noise = local_decay(h, 0.4);
    OperatorSpec ham = testutil::random_operator(h, 3, 2, rng);
    ham = ham + ham.adjoint(); // hermitian
    Mat rho = testutil::random_density(4, 4, rng);
    Mat rhs = lindblad_rhs(DenseState{h, rho, 0.0}, ham, noise);
    CHECK(std::abs(rhs.trace()) < 1e-12);

    // independent dense assembly
    Mat hd = testutil::dense_of(ham);
    Mat expect = cxd(0, -1) * (hd * rho - rho * hd);
    for (const auto& j : noise.jumps) {
        Mat jd = testutil::dense_of(j);
        Mat q = jd.adjoint() * jd;
        expect += jd * rho * jd.adjoint() - 0.5 * (q * rho + rho * q);
    }
    CHECK((rhs - expect).norm() < 1e-12 * expect.norm() + 1e-14);
}

TEST_CASE("integrate_exact reproduces single-qubit decay to 1e-8") {
    auto h = HilbertSpec::qubits(1);
    const double gamma = 0.35, t_final = 2.0;
    Vec up = Vec::Zero(2);
    up[0] = 1.0;
    DenseState out = integrate_exact_segment(DenseState{h, up * up.adjoint(), 0.0}, ops::zero(h),
                                             local_decay(h, gamma), t_final, 1e-10);
    CHECK(std::abs(out.rho(0, 0).real() - std::exp(-gamma * t_final)) < 1e-8);
    CHECK(std::abs(out.rho(1, 1).real() - (1.0 - std::exp(-gamma * t_final))) < 1e-8);
}

TEST_CASE("noiseless QFT on psi_0 yields the GHZ projector") {
    const int l = 4;
    auto h = HilbertSpec::qubits(l);
    Vec psi = inverse_qft_ghz_state(l);
    GateSchedule schedule = qft_schedule(l, 1.0);
    DenseState out = integrate_exact(DenseState{h, psi * psi.adjoint(), 0.0}, schedule,
                                     NoiseModel::none(h), 1e-10);
    Vec ghz = ghz_state(l);
    Mat proj = ghz * ghz.adjoint();
    CHECK((out.rho - proj).norm() < 1e-7);
}

TEST_CASE("dense trajectories preserve trace and Hermiticity through a noisy QFT") {
    const int l = 4;
    auto h = HilbertSpec::qubits(l);
    GateSchedule schedule = qft_schedule(l, 1.0);
    const double gamma = 2.5e-2 / schedule.total_duration();
    Vec psi = inverse_qft_ghz_state(l);
    DenseState out = integrate_exact(DenseState{h, psi * psi.adjoint(), 0.0}, schedule,
                                     local_decay(h, gamma), 1e-9);
    CHECK(std::abs(out.rho.trace().real() - 1.0) < 1e-8);
    CHECK((out.rho - out.rho.adjoint()).norm() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Mat> es(out.rho);
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
}

TEST_CASE("fidelity_dense: self-fidelity one, orthogonal projectors zero") {
    std::mt19937_64 rng(33);
    Mat rho = testutil::random_density(4, 2, rng);
    CHECK(fidelity_dense(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));

    Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    CHECK(fidelity_dense(p0, p1) < 1e-12);
}

TEST_CASE("fidelity_dense agrees with fidelity_mixed on corner-compressed copies") {
    std::mt19937_64 rng(34);
    auto h = HilbertSpec::qubits(2);
    for (int trial = 0; trial < 5; ++trial) {
        Mat rho = testutil::random_density(4, 3, rng);
        Mat sig = testutil::random_density(4, 2, rng);
        const double dense = fidelity_dense(rho, sig);
        const double low_rank =
            fidelity_mixed(corner_from_dense(h, rho), corner_from_dense(h, sig));
        CHECK(dense == doctest::Approx(low_rank).epsilon(1e-8));
    }
}

TEST_CASE("corner_from_dense returns descending, renormalized weights") {
    std::mt19937_64 rng(35);
    auto h = HilbertSpec::qubits(3);
    Mat rho = testutil::random_density(8, 5, rng);
    CornerBasis b = corner_from_dense(h, rho);
    CHECK(b.rank() == 5);
    CHECK(b.p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 1; k < b.rank(); ++k) CHECK(b.p[k] <= b.p[k - 1]);
    CHECK((to_density_matrix(b) - rho).norm() < 1e-10);
}

TEST_CASE("benchmark_pair converges at small L") {
    StepConfig cfg;
    cfg.dt = 0.05;
    cfg.ode_tol = 1e-10;
    BenchmarkResult r = benchmark_pair(4, 2.5e-2, 1e-6, cfg, 1e-8);
    CHECK(r.fidelity_cross >= 0.9999);
    CHECK(r.t_corner_s > 0.0);
    CHECK(r.t_exact_s > 0.0);
}

TEST_CASE("the dense cap is enforced") {
    auto h = HilbertSpec::qubits(2);
    DenseState s{h, Mat::Identity(4, 4) / 4.0, 0.0};
    GateSchedule g(h);
    g.append(Segment{"x", ops::zero(h), 1.0});
    CHECK_THROWS_AS(integrate_exact(s, g, NoiseModel::none(h), 1e-8, /*dense_cap=*/2),
                    std::invalid_argument);
}

} // TEST_SUITE
