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

#include "cornersim/corner.hpp"
#include "cornersim/dense_oracle.hpp"
#include "cornersim/metrics.hpp"
#include "test_util.hpp"

using namespace cornersim;

namespace {

StepConfig tight_config() {
    StepConfig cfg;
    cfg.dt = 1e-3;
    cfg.eps = 1e-10;
    cfg.ode_tol = 1e-11;
    return cfg;
}

} // namespace

TEST_SUITE("corner") {

TEST_CASE("from_pure_state: basis vectors and normalization") {
    auto h = HilbertSpec::qubits(1);
    Vec e0 = Vec::Zero(2);
    e0[0] = 1.0;
    CornerBasis b = from_pure_state(h, e0);
    CHECK(b.rank() == 1);
    CHECK(b.p[0] == 1.0);
    CHECK((b.C.col(0) - e0).norm() < 1e-15);

    Vec two_e1 = Vec::Zero(2);
    two_e1[1] = 2.0;
    CornerBasis b2 = from_pure_state(h, two_e1);
    CHECK(std::abs(b2.C(1, 0) - 1.0) < 1e-15);

    CHECK_THROWS_AS(from_pure_state(h, Vec::Zero(2)), std::invalid_argument);
}

TEST_CASE("from_pure_state keeps the GHZ-preimage exactly") {
    Vec psi0 = inverse_qft_ghz_state(3);
    CornerBasis b = from_pure_state(HilbertSpec::qubits(3), psi0);
    CHECK(b.rank() == 1);
    CHECK(std::abs(psi0.dot(b.C.col(0))) == doctest::Approx(1.0).epsilon(1e-13));
    // the dominant amplitude of psi_0 is already real positive, so the
    // stored column is psi_0 itself
    CHECK((b.C.col(0) - psi0).norm() < 1e-13);
}

TEST_CASE("gram_truncate: single column becomes a normalized rank-1 corner") {
    std::mt19937_64 rng(1);
    Mat t = testutil::random_matrix(16, 1, rng);
    StepConfig cfg = tight_config();
    GramResult res = gram_truncate(t, cfg);
    CHECK(res.p.size() == 1);
    CHECK(res.p[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(res.C.col(0).norm() == doctest::Approx(1.0).epsilon(1e-12));
    // column parallel to the input
    const double overlap = std::abs(t.col(0).normalized().dot(res.C.col(0)));
    CHECK(overlap == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gram_truncate: duplicate columns collapse to rank 1") {
    std::mt19937_64 rng(2);
    Vec u = testutil::random_vector(8, rng);
    u *= (1.0 / std::sqrt(2.0)) / u.norm(); // |u|^2 = 1/2
    Mat t(8, 2);
    t.col(0) = u;
    t.col(1) = u;
    GramResult res = gram_truncate(t, tight_config());
    CHECK(res.p.size() == 1);
    CHECK(res.p[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(u.normalized().dot(res.C.col(0))) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gram_truncate reproduces the dense eigendecomposition of T T^+") {
    std::mt19937_64 rng(3);
    Mat t = testutil::random_matrix(16, 6, rng);
    t *= 1.0 / t.norm();
    StepConfig cfg = tight_config();
    cfg.eps = 1e-10;
    GramResult res = gram_truncate(t, cfg);

    Eigen::SelfAdjointEigenSolver<Mat> es(t * t.adjoint());
    Eigen::VectorXd dense_p = es.eigenvalues().tail(6).reverse();
    dense_p /= dense_p.sum();
    REQUIRE(res.p.size() == 6);
    CHECK((res.p - dense_p).cwiseAbs().maxCoeff() < 1e-9);

    // reconstruction: C C^+ equals the normalized T T^+
    Mat lhs = res.C * res.C.adjoint();
    Mat rhs = (t * t.adjoint()) / (t * t.adjoint()).trace().real();
    CHECK((lhs - rhs).norm() < 1e-9);
}

TEST_CASE("gram_truncate output columns are orthogonal with norms p_k") {
    std::mt19937_64 rng(4);
    Mat t = testutil::random_matrix(32, 10, rng);
    GramResult res = gram_truncate(t, tight_config());
    Mat overlap = res.C.adjoint() * res.C;
    for (Eigen::Index i = 0; i < overlap.rows(); ++i) {
        for (Eigen::Index j = 0; j < overlap.cols(); ++j) {
            const cxd expect = (i == j) ? cxd(res.p[i], 0.0) : cxd(0.0, 0.0);
            CHECK(std::abs(overlap(i, j) - expect) < 1e-10);
        }
    }
    // weights renormalized to one, descending
    CHECK(res.p.sum() == doctest::Approx(1.0).epsilon(1e-13));
    for (Eigen::Index k = 1; k < res.p.size(); ++k) CHECK(res.p[k] <= res.p[k - 1] + 1e-15);
}

TEST_CASE("gram_truncate honors m_max and flags an unreachable budget") {
    std::mt19937_64 rng(5);
    Mat t = testutil::random_matrix(32, 8, rng);
    StepConfig cfg = tight_config();
    cfg.eps = 1e-12;
    cfg.m_max = 3;
    GramResult res = gram_truncate(t, cfg);
    CHECK(res.p.size() == 3);
    CHECK(res.eps_unreachable);
    CHECK(res.discarded > 0.0);
}

TEST_CASE("gram_truncate rejects non-finite input") {
    Mat t = Mat::Ones(4, 2);
    t(1, 1) = cxd(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(gram_truncate(t, tight_config()), NumericalFailure);
}

TEST_CASE("transition basis layout follows the Kraus column arithmetic") {
    // L=2, M=2, D=2: 6 columns ordered (K0 phi1, K0 phi2, J1 phi1,
    // J1 phi2, J2 phi1, J2 phi2) with the sqrt(p) weights inherited from
    // the corner columns.
    auto h = HilbertSpec::qubits(2);
    std::mt19937_64 rng(6);
    Mat pre = testutil::random_matrix(4, 2, rng);
    Mat coh = testutil::random_matrix(4, 2, rng);
    NoiseModel noise = local_decay(h, 0.3);
    const double dt = 0.01;
    Mat t = expand_transition_basis(coh, pre, noise, dt);
    REQUIRE(t.cols() == 6);
    CHECK((t.leftCols(2) - coh).norm() == 0.0);
    for (int i = 0; i < 2; ++i) {
        Mat ji = std::sqrt(dt) * (testutil::dense_of(noise.jumps[i]) * pre);
        CHECK((t.middleCols(2 * (i + 1), 2) - ji).norm() < 1e-14);
    }
}

TEST_CASE("transition basis: no channels and single-jump forced columns") {
    auto h = HilbertSpec::qubits(1);
    Mat pre(2, 1);
    pre << 1.0, 0.0;
    Mat coh = pre;
    CHECK(expand_transition_basis(coh, pre, NoiseModel::none(h), 0.1).cols() == 1);

    const double gamma = 0.5, dt = 0.02;
    NoiseModel noise = local_decay(h, gamma);
    Mat t = expand_transition_basis(coh, pre, noise, dt);
    REQUIRE(t.cols() == 2);
    CHECK(std::abs(t(1, 1) - std::sqrt(gamma * dt)) < 1e-14);
    CHECK(std::abs(t(0, 1)) < 1e-15);
}

TEST_CASE("transition basis matches the dense Kraus map to O(dt^2)") {
    // sum_i K_i rho K_i^+ with K_0 = exp(-i dt H_eff) applied exactly:
    // T T^+ must reproduce it up to the splitting error.
    auto h = HilbertSpec::qubits(2);
    std::mt19937_64 rng(7);
    NoiseModel noise = local_decay(h, 0.8);
    OperatorSpec ham = ops::two_site(h, 1, ops::pauli_x(), 2, ops::pauli_x(), 0.7, true);
    OperatorSpec h_eff = build_effective_hamiltonian(ham, noise.jumps);

    Mat c = testutil::random_matrix(4, 2, rng);
    c *= 1.0 / c.norm();
    const double dt = 1e-3;
    Mat coh = coherent_substep(c, h_eff, dt, 1e-13);
    Mat t = expand_transition_basis(coh, c, noise, dt);

    Mat k0 = (cxd(0.0, -dt) * testutil::dense_of(h_eff)).exp();
    Mat rho = c * c.adjoint();
    Mat kraus = k0 * rho * k0.adjoint();
    for (const auto& j : noise.jumps) {
        Mat jd = testutil::dense_of(j);
        kraus += dt * jd * rho * jd.adjoint();
    }
    CHECK((t * t.adjoint() - kraus).norm() < 5.0 * dt * dt);
}

TEST_CASE("step: identity dynamics leaves the corner unchanged") {
    auto h = HilbertSpec::qubits(2);
    Vec psi = inverse_qft_ghz_state(2);
    CornerBasis b = from_pure_state(h, psi);
    StepConfig cfg = tight_config();
    CornerBasis after = step(b, ops::zero(h), NoiseModel::none(h), cfg);
    CHECK(after.rank() == 1);
    CHECK((after.C - b.C).norm() < 1e-12);
    CHECK(after.t == doctest::Approx(cfg.dt));
}

TEST_CASE("step: amplitude damping tracks the closed-form decay") {
    // excited population e^{-gamma t} at gamma t = 1, within O(dt^2) * t.
    auto h = HilbertSpec::qubits(1);
    const double gamma = 1.0;
    const double dt = 1e-3;
    NoiseModel noise = local_decay(h, gamma);
    StepConfig cfg;
    cfg.dt = dt;
    cfg.eps = 1e-12;
    cfg.ode_tol = 1e-12;
    Vec up = Vec::Zero(2);
    up[0] = 1.0;
    CornerBasis state = from_pure_state(h, up);
    CornerStepper stepper(ops::zero(h), noise, cfg);
    const int nsteps = static_cast<int>(std::round(1.0 / dt));
    for (int i = 0; i < nsteps; ++i) state = stepper.step(state);

    Mat rho = to_density_matrix(state);
    CHECK(std::abs(rho(0, 0).real() - std::exp(-1.0)) <= 1e-3);
    CHECK(state.rank() == 2);
    // trace renormalized each step
    CHECK(state.p.sum() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("trace drift accumulates at O(dt^2) per step") {
    auto h = HilbertSpec::qubits(1);
    NoiseModel noise = local_decay(h, 1.0);
    Vec up = Vec::Zero(2);
    up[0] = 1.0;
    auto drift_for = [&](double dt) {
        StepConfig cfg;
        cfg.dt = dt;
        cfg.eps = 1e-12;
        cfg.ode_tol = 1e-12;
        CornerBasis state = from_pure_state(h, up);
        CornerStepper stepper(ops::zero(h), noise, cfg);
        const int nsteps = static_cast<int>(std::round(0.5 / dt));
        for (int i = 0; i < nsteps; ++i) state = stepper.step(state);
        return state.trace_drift;
    };
    const double d1 = drift_for(0.02);
    const double d2 = drift_for(0.01);
    // halved dt gives twice the steps of quarter the defect: total halves
    CHECK(d2 < d1 * 0.65);
    CHECK(d2 > d1 * 0.35);
}

TEST_CASE("pure unitary limit: empty noise keeps M = 1 and matches dense evolution") {
    auto h = HilbertSpec::qubits(2);
    OperatorSpec ham = ops::two_site(h, 1, ops::pauli_x(), 2, ops::pauli_y(), 0.4, true) +
                       ops::single_site(h, 1, ops::pauli_z(), 0.3, true);
    Vec psi = inverse_qft_ghz_state(2);
    StepConfig cfg;
    cfg.dt = 0.05;
    cfg.eps = 1e-9;
    cfg.ode_tol = 1e-12;
    CornerBasis state = from_pure_state(h, psi);
    CornerStepper stepper(ham, NoiseModel::none(h), cfg);
    const int nsteps = 40;
    for (int i = 0; i < nsteps; ++i) {
        state = stepper.step(state);
        CHECK(state.rank() == 1);
    }
    Mat u = (cxd(0.0, -cfg.dt * nsteps) * testutil::dense_of(ham)).exp();
    Vec expect = u * psi;
    CHECK(std::abs(std::abs(expect.dot(state.C.col(0))) - 1.0) < 1e-9);
}

TEST_CASE("evolve_schedule hits segment boundaries exactly and rejects bad durations") {
    auto h = HilbertSpec::qubits(1);
    GateSchedule schedule(h);
    schedule.append(Segment{"a", ops::zero(h), 0.123});
    schedule.append(Segment{"b", ops::zero(h), 0.077});
    StepConfig cfg;
    cfg.dt = 0.05; // does not divide either duration
    cfg.eps = 1e-9;
    Vec up = Vec::Zero(2);
    up[0] = 1.0;
    std::vector<double> times;
    CornerBasis out = evolve_schedule(from_pure_state(h, up), schedule, NoiseModel::none(h), cfg,
                                      [&](const CornerBasis& s) { times.push_back(s.t); });
    CHECK(out.t == doctest::Approx(0.2).epsilon(1e-12));
    // boundary time 0.123 observed exactly
    bool saw_boundary = false;
    for (double t : times) saw_boundary |= std::abs(t - 0.123) < 1e-12;
    CHECK(saw_boundary);

    CHECK_THROWS_AS(schedule.append(Segment{"bad", ops::zero(h), -1.0}), std::invalid_argument);
    // a segment shorter than dt is a single shortened step
    GateSchedule tiny(h);
    tiny.append(Segment{"t", ops::zero(h), 0.01});
    CornerBasis out2 = evolve_schedule(from_pure_state(h, up), tiny, NoiseModel::none(h), cfg);
    CHECK(out2.t == doctest::Approx(0.01));
}

TEST_CASE("schedule of two zero-Hamiltonian segments is the identity") {
    auto h = HilbertSpec::qubits(2);
    GateSchedule schedule(h);
    schedule.append(Segment{"z1", ops::zero(h), 0.4});
    schedule.append(Segment{"z2", ops::zero(h), 0.6});
    Vec psi = inverse_qft_ghz_state(2);
    StepConfig cfg = tight_config();
    cfg.dt = 0.1;
    CornerBasis out = evolve_schedule(from_pure_state(h, psi), schedule, NoiseModel::none(h), cfg);
    CHECK(std::abs(std::abs(psi.dot(out.C.col(0))) - 1.0) < 1e-12);
}

TEST_CASE("hadamard pair schedule creates the equal superposition") {
    auto h = HilbertSpec::qubits(1);
    GateSchedule schedule(h);
    for (auto& seg : hadamard_segments(h, 1, 1.0)) schedule.append(std::move(seg));
    Vec up = Vec::Zero(2);
    up[0] = 1.0;
    StepConfig cfg;
    cfg.dt = 0.02;
    cfg.eps = 1e-10;
    cfg.ode_tol = 1e-12;
    CornerBasis out = evolve_schedule(from_pure_state(h, up), schedule, NoiseModel::none(h), cfg);
    Vec plus = Vec::Constant(2, 1.0 / std::sqrt(2.0));
    CHECK(fidelity_to_pure(out, plus) >= 1.0 - 1e-8);
}

TEST_CASE("controlled phase acquires e^{i theta} against the dense unitary oracle") {
    auto h = HilbertSpec::qubits(2);
    const double theta = M_PI / 2.0;
    GateSchedule schedule(h);
    schedule.append(controlled_phase_segment(h, 1, 2, theta, 1.0));
    std::mt19937_64 rng(8);
    Vec psi = testutil::random_vector(4, rng);
    psi.normalize();
    StepConfig cfg;
    cfg.dt = 0.05;
    cfg.eps = 1e-10;
    cfg.ode_tol = 1e-12;
    CornerBasis out = evolve_schedule(from_pure_state(h, psi), schedule, NoiseModel::none(h), cfg);
    Mat u = (cxd(0.0, -schedule.segments[0].duration) *
             testutil::dense_of(schedule.segments[0].hamiltonian))
                .exp();
    CHECK(std::abs(std::abs((u * psi).dot(out.C.col(0))) - 1.0) < 1e-8);
    // the unitary is diag(1,1,1,e^{i theta}) up to a global phase
    Mat expect = Mat::Identity(4, 4);
    expect(3, 3) = std::polar(1.0, theta);
    const cxd phase = u(0, 0);
    CHECK((u / phase - expect).norm() < 1e-10);
}

TEST_CASE("halving eps never increases the dense-oracle infidelity") {
    // statistical monotone-control check over several random inputs
    auto h = HilbertSpec::qubits(3);
    GateSchedule schedule = qft_schedule(3, 1.0);
    const double gamma = 0.02; // strong enough that truncation matters
    NoiseModel noise = local_decay(h, gamma);
    std::mt19937_64 rng(9);
    double worst_regression = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        Vec psi = testutil::random_vector(8, rng);
        psi.normalize();
        DenseState rho0{h, psi * psi.adjoint(), 0.0};
        DenseState exact = integrate_exact(rho0, schedule, noise, 1e-10);
        auto infid_at = [&](double eps) {
            StepConfig cfg;
            cfg.dt = 0.02;
            cfg.eps = eps;
            cfg.ode_tol = 1e-11;
            CornerBasis out = evolve_schedule(from_pure_state(h, psi), schedule, noise, cfg);
            return 1.0 - fidelity_dense(to_density_matrix(out), exact.rho);
        };
        const double coarse = infid_at(4e-3);
        const double fine = infid_at(2e-3);
        worst_regression = std::max(worst_regression, fine - coarse);
    }
    CHECK(worst_regression <= 1e-8);
}

TEST_CASE("corner converges to the dense oracle as dt and eps shrink") {
    auto h = HilbertSpec::qubits(2);
    GateSchedule schedule(h);
    for (auto& seg : hadamard_segments(h, 1, 1.0)) schedule.append(std::move(seg));
    schedule.append(controlled_phase_segment(h, 1, 2, M_PI / 2, 1.0));
    NoiseModel noise = local_decay(h, 0.05);
    Vec psi = inverse_qft_ghz_state(2);
    DenseState exact =
        integrate_exact(DenseState{h, psi * psi.adjoint(), 0.0}, schedule, noise, 1e-11);

    double last = 1.0;
    for (auto [dt, eps] : {std::pair{0.2, 1e-3}, {0.05, 1e-5}, {0.0125, 1e-7}}) {
        StepConfig cfg;
        cfg.dt = dt;
        cfg.eps = eps;
        cfg.ode_tol = 1e-12;
        CornerBasis out = evolve_schedule(from_pure_state(h, psi), schedule, noise, cfg);
        const double infid = 1.0 - fidelity_dense(to_density_matrix(out), exact.rho);
        CHECK(infid < last + 1e-12);
        last = infid;
    }
    CHECK(last < 2e-5);
}

TEST_CASE("randomized jump-block compression preserves the evolved state") {
    auto h = HilbertSpec::qubits(5);
    GateSchedule schedule = qft_schedule(5, 1.0);
    NoiseModel noise = local_decay(h, 2e-3);
    Vec psi = inverse_qft_ghz_state(5);
    StepConfig cfg;
    cfg.dt = 0.1;
    cfg.eps = 1e-5;
    cfg.ode_tol = 1e-11;
    CornerBasis plain = evolve_schedule(from_pure_state(h, psi), schedule, noise, cfg);
    cfg.sketch_min = 16; // activates once M D outgrows the sketch
    CornerBasis sketched = evolve_schedule(from_pure_state(h, psi), schedule, noise, cfg);
    CHECK(fidelity_mixed(plain, sketched) >= 1.0 - 1e-4);
    CHECK(std::abs(von_neumann_entropy(plain) - von_neumann_entropy(sketched)) < 1e-3);

    // bit-identical reruns (seeded sketches)
    CornerBasis again = evolve_schedule(from_pure_state(h, psi), schedule, noise, cfg);
    CHECK((again.C - sketched.C).norm() == 0.0);
}

TEST_CASE("jump-column pruning stays within the accounted eps budget") {
    auto h = HilbertSpec::qubits(3);
    GateSchedule schedule = qft_schedule(3, 1.0);
    NoiseModel noise = local_decay(h, 1e-3);
    Vec psi = inverse_qft_ghz_state(3);
    StepConfig cfg;
    cfg.dt = 0.05;
    cfg.eps = 1e-6;
    cfg.ode_tol = 1e-11;
    CornerBasis plain = evolve_schedule(from_pure_state(h, psi), schedule, noise, cfg);
    cfg.jump_col_floor = 0.1;
    CornerBasis pruned = evolve_schedule(from_pure_state(h, psi), schedule, noise, cfg);
    CHECK(fidelity_mixed(plain, pruned) >= 1.0 - 10.0 * cfg.eps * 200);
    CHECK(pruned.eps_step <= cfg.eps * 1.5);
}

} // TEST_SUITE
