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

#include "cornersim/corner.hpp"
#include "cornersim/metrics.hpp"

namespace cornersim {

/// Full density matrix, the brute-force reference object.
struct DenseState {
    HilbertSpec space;
    Mat rho;
    double t = 0.0;
};

/// Right-hand side of the master equation,
///   -i[H, rho] + sum_i (J_i rho J_i^+ - 1/2 {J_i^+ J_i, rho}),
/// evaluated by applying the structured operators left and right; the
/// N^2 x N^2 superoperator is never materialized.
Mat lindblad_rhs(const DenseState& state, const OperatorSpec& hamiltonian,
                 const NoiseModel& noise);

/// Caches the per-segment structured operators for repeated evaluation.
class DenseLindbladRhs {
  public:
    DenseLindbladRhs(OperatorSpec hamiltonian, const NoiseModel& noise);
    void operator()(const Mat& rho, Mat& out) const;
    const HilbertSpec& space() const { return hamiltonian_.space; }

  private:
    OperatorSpec hamiltonian_;
    std::vector<OperatorSpec> jumps_;
    std::vector<OperatorSpec> jump_adjoints_;
    OperatorSpec quad_; // sum_i J_i^+ J_i
    // fused elementwise paths when H and/or J^+J are diagonal
    Vec ham_diag_;
    Vec quad_diag_;
};

/// Adaptive integration of the master equation through a schedule with
/// sudden switching. Throws above the dense dimension cap.
DenseState integrate_exact(const DenseState& rho0, const GateSchedule& schedule,
                           const NoiseModel& noise, double tol = 1e-8,
                           std::int64_t dense_cap = 1 << 10);

/// Same, for a single constant Hamiltonian over a duration.
DenseState integrate_exact_segment(const DenseState& rho0, const OperatorSpec& hamiltonian,
                                   const NoiseModel& noise, double duration, double tol = 1e-8,
                                   std::int64_t dense_cap = 1 << 10);

/// Uhlmann fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)) via dense
/// eigendecompositions.
double fidelity_dense(const Mat& rho, const Mat& sigma);

/// Leading eigenpairs of a dense density matrix packaged as a corner
/// basis (weights renormalized); for cross-validation of the low-rank
/// metric paths.
CornerBasis corner_from_dense(HilbertSpec h, const Mat& rho, double keep_tol = 1e-12);

struct BenchmarkResult {
    int L = 0;
    double epsilon = 0.0;
    double t_corner_s = 0.0;
    double t_exact_s = 0.0;
    double fidelity_cross = 0.0;
    int max_corner_dim = 0;
};

/// Runs the noisy QFT on |psi_0> with both engines on identical
/// schedules and reports wall times plus the cross fidelity.
BenchmarkResult benchmark_pair(int L, double gamma_t_qft, double epsilon,
                               const StepConfig& base_cfg, double exact_tol = 1e-8);

} // namespace cornersim
