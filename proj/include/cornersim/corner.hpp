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

#include "cornersim/integrator.hpp"
#include "cornersim/noise.hpp"
#include "cornersim/schedule.hpp"

namespace cornersim {

/// Raised on numerical failures of the truncation step (non-finite Gram
/// matrix, vanishing transition weight).
struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Weighted low-rank factorization of the density matrix: column k of C
/// is sqrt(p_k)|phi_k>, so rho = C C^dagger. Immediately after a
/// truncation the columns are mutually orthogonal with squared norms p_k
/// (descending); mid-step this does not hold.
struct CornerBasis {
    HilbertSpec space;
    Mat C;              // N x M
    Eigen::VectorXd p;  // descending, sums to 1 after renormalization
    double t = 0.0;
    double eps_step = 0.0;     // weight discarded by the last truncation
    double eps_total = 0.0;    // accumulated discarded weight (the running eps_M)
    double eps_budget = 0.0;   // configured tolerance
    double trace_drift = 0.0;  // accumulated |tr - 1| before renormalization
    bool eps_unreachable = false; // last step could not meet eps under m_max

    int rank() const { return static_cast<int>(C.cols()); }
};

struct StepConfig {
    double dt = 0.05;        // outer step, units of 1/delta
    double ode_tol = 1e-10;  // coherent-substep local tolerance
    double eps = 1e-6;       // truncation budget (see eps_horizon)
    // When > 0, eps is a whole-run budget amortized over this time span:
    // each step may discard at most eps * dt / eps_horizon, so the total
    // discarded weight stays within eps. When 0, eps applies per step.
    // evolve_schedule fills this with the schedule duration; a per-step
    // reading of a run-level budget would silently drop any dissipation
    // weaker than eps / dt per unit time.
    double eps_horizon = 0.0;
    int m_max = 0;           // cap on the corner dimension; 0 = uncapped
    double p_floor = 1e-14;  // eigenvalue noise floor
    SubstepMethod substep = SubstepMethod::Auto;
    int krylov_dim = 24;
    // Relative floor below which near-empty jump columns are dropped
    // before the Gram step, their weight charged to eps_step. 0 keeps the
    // full M(D+1) transition layout.
    double jump_col_floor = 0.0;
    // Oversampling margin for randomized truncation of the transition
    // basis (0 = exact Gram eigendecomposition). When set, wide Gram
    // steps are replaced by a Halko-style range finder of size
    // s ~ M + sketch_min; the weight missed by the sketch is measured
    // exactly and charged against the step budget. Cuts the dominant
    // cost from O(M^2 (D+1)^2 N) towards O(M^2 (D+1) N).
    int sketch_min = 0;
    int observer_stride = 1;

    void validate() const;
    /// Truncation budget for one step of size dt.
    double step_eps(double step_dt) const;
};

/// M = 1 corner from a (possibly unnormalized) pure state. Columns are
/// phase-fixed: the largest-magnitude amplitude is made real positive.
CornerBasis from_pure_state(HilbertSpec h, const Vec& psi);

/// Densifies rho = C C^dagger (diagnostic / small systems).
Mat to_density_matrix(const CornerBasis& basis, std::int64_t dense_cap = 4096);

/// One no-jump evolution of the corner columns by exp(-i dt H_eff).
Mat coherent_substep(const Mat& C, const OperatorSpec& h_eff, double dt, double tol,
                     SubstepMethod method = SubstepMethod::Krylov);

/// Assembles the weighted transition basis: [K_0 block | jump blocks],
/// column m = sqrt(p_mu) K_nu |phi_mu> with nu = (m-1) div M and
/// mu = (m-1) mod M + 1. The K_0 block is the coherent-substep output;
/// jump blocks apply sqrt(dt) J_i to the pre-substep columns.
/// Columns of squared norm below prune_floor are dropped from the jump
/// blocks when prune_floor > 0; their total weight is returned.
Mat expand_transition_basis(const Mat& coherent_block, const Mat& pre_block,
                            const NoiseModel& noise, double dt, double prune_floor = 0.0,
                            double* pruned_weight = nullptr);

struct GramResult {
    Mat C;
    Eigen::VectorXd p;
    double total_weight = 0.0;   // tr(T^dagger T) after the noise-floor clip
    double discarded = 0.0;      // eigenvalue weight dropped by truncation
    double trace_defect = 0.0;   // |tr(T^dagger T) - 1|
    bool eps_unreachable = false;
};

/// Gram-trick truncation: diagonalizes sigma = T^dagger T, keeps the
/// smallest leading set with discarded weight <= eps (capped at m_max),
/// maps eigenvectors back through T, renormalizes the trace to one and
/// phase-fixes the columns.
GramResult gram_truncate(const Mat& T, const StepConfig& cfg);

/// Sketched form of the same truncation: projects T onto a seeded
/// randomized range of size >= s_start before the eigendecomposition.
/// The weight outside the range is measured exactly, returned through
/// residual_out, and spent from the eps budget; the sketch doubles until
/// the residual fits `allowance`.
GramResult randomized_truncate(const Mat& T, const StepConfig& cfg, Eigen::Index s_start,
                               double allowance, std::uint64_t seed,
                               double* residual_out = nullptr,
                               Eigen::Index* sketch_used = nullptr);

/// Caches the effective Hamiltonian and its propagator for one
/// (Hamiltonian, noise) pair; steps are pure value transformations.
class CornerStepper {
  public:
    CornerStepper(const OperatorSpec& hamiltonian, const NoiseModel& noise, StepConfig cfg);

    CornerBasis step(const CornerBasis& state, double dt) const;
    CornerBasis step(const CornerBasis& state) const { return step(state, cfg_.dt); }

    const OperatorSpec& effective_hamiltonian() const { return propagator_.generator(); }
    const KrylovStats& substep_stats() const { return propagator_.stats(); }

  private:
    StepConfig cfg_;
    NoiseModel noise_;
    CoherentPropagator propagator_;
    // Sketch size and allowance adapt to the achieved truncation level:
    // when a rank cap makes the budget unreachable, resolving the basis
    // finer than the cap's own discard is wasted work.
    mutable double last_discard_ = 0.0;
    mutable Eigen::Index sketch_hint_ = 0;
};

/// One full corner step under a constant Hamiltonian (convenience form
/// that rebuilds the effective Hamiltonian each call).
CornerBasis step(const CornerBasis& state, const OperatorSpec& hamiltonian,
                 const NoiseModel& noise, const StepConfig& cfg);

using StepObserver = std::function<void(const CornerBasis&)>;

/// Drives the corner state through a gate schedule with sudden switching
/// at segment boundaries; the final step of each segment is shortened to
/// land on the boundary exactly. The observer (if any) fires on the
/// initial state, every observer_stride-th step, and each boundary.
CornerBasis evolve_schedule(CornerBasis state, const GateSchedule& schedule,
                            const NoiseModel& noise, const StepConfig& cfg,
                            const StepObserver& observer = {});

} // namespace cornersim
