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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cornersim/dense_oracle.hpp"
#include "cornersim/kerr_cat.hpp"
#include "cornersim/metrics.hpp"
#include "cornersim/tomography.hpp"

namespace cornersim {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Fully resolved run description; parsed from CLI flags and/or a JSON
/// config file (file values override flags). delta = 1 sets the time
/// unit; rates are configured either as gamma/delta or via a target
/// gamma * T_qft (exactly one).
struct RunConfig {
    std::string experiment = "qft"; // qft|scaling|sweep|benchmark|tomography|kerrcat
    int L = 8;
    double delta = 1.0;
    std::optional<double> gamma_over_delta;
    std::optional<double> gamma_t_qft;
    std::string noise = "decay"; // decay|dephasing|collective|none
    double epsilon = 1e-4;
    int m_max = 0;
    double dt = 0.05;
    double ode_tol = 1e-10;
    double p_floor = 1e-14;
    double jump_col_floor = 0.0;
    int sketch_min = 0;
    std::string initial_state = "ghz_preimage"; // ghz_preimage | bitstring | random_basis
    std::string bitstring;
    int sample_count = 64;      // random_basis sweep size
    std::uint64_t seed = 12345;
    int observer_stride = 5;
    bool entanglement_cuts = false;
    std::string output_prefix;  // empty = no files written
    int threads = 0;            // 0 = hardware concurrency
    bool deterministic = false;

    std::vector<int> l_list = {6, 7, 8, 9, 10, 11, 12};           // scaling
    std::vector<double> gamma_scaling_list = {2.5e-4, 1e-3};      // scaling
    std::vector<int> benchmark_l_list = {4, 6, 8, 10};            // benchmark
    double benchmark_gamma_t = 2.5e-2;
    double exact_tol = 1e-8;

    double kerr_k = 10.0, kerr_omega_c = 1.0, kerr_drive = 50.0, kerr_gamma = 1.0,
           kerr_kappa = 2.0;
    int kerr_n_ph = 20;
    double kerr_t_final = 10.0;
    double kerr_dt = 2e-4;
    double wigner_extent = 7.5;
    int wigner_points = 101;

    void validate() const;
    StepConfig step_config() const;

    /// gamma resolved for an L-qubit QFT of duration T(L).
    double resolve_gamma(int l) const;

    std::string to_json_string() const;
    static RunConfig from_json_string(const std::string& text);
    static RunConfig from_json_file(const std::string& path);
    /// Applies the keys present in a config file on top of this config
    /// (file values override flags).
    void merge_json_file(const std::string& path);
};

/// Applies threads/determinism knobs process-wide.
void apply_execution_config(const RunConfig& config);

struct TimeSample {
    double t = 0.0;
    int m = 0;
    double entropy = 0.0;
    double trace_drift = 0.0;
    std::string segment_label;
    std::vector<double> entanglement; // per cut, empty if disabled
};

struct QftRunResult {
    int L = 0;
    double gamma = 0.0;
    double gamma_t = 0.0;
    double t_qft = 0.0;
    double fidelity_to_ideal = 0.0;
    double final_entropy = 0.0;
    double n_up = 0.0;
    double barycenter = 0.0;
    int max_corner_dim = 0;
    double trace_drift = 0.0;
    bool eps_unreachable = false;
    double wall_time_s = 0.0;
    std::vector<TimeSample> series;
};

/// Noisy QFT run: evolves the configured initial state, samples the time
/// series, and measures the final fidelity against the noiseless output.
/// Writes <prefix>_timeseries.csv and <prefix>_result.json when an
/// output prefix is set.
QftRunResult run_qft(const RunConfig& config);

struct ScalingPoint {
    std::string state;
    double gamma_over_delta = 0.0;
    int L = 0;
    double infidelity = 0.0;
};

struct ScalingFit {
    std::string state;
    double gamma_over_delta = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
};

struct ScalingResult {
    std::vector<ScalingPoint> points;
    std::vector<ScalingFit> fits;
};

/// Infidelity growth with L: runs the noisy QFT across l_list and the
/// configured gamma values and initial states, fitting log(1-F) against
/// log L.
ScalingResult run_scaling(const RunConfig& config);

struct SweepResult {
    std::vector<SweepRecord> decay_records;
    std::vector<SweepRecord> dephasing_records;
    BilinearFit decay_fit;
    BilinearFit dephasing_fit;
    std::string prng = "mt19937_64";
};

/// Initial-state sweep over canonical basis states (sampled without
/// replacement, seeded) under decay AND dephasing noise.
SweepResult run_sweep(const RunConfig& config);

/// Corner-vs-exact wall-time benchmark over benchmark_l_list.
std::vector<BenchmarkResult> run_benchmark(const RunConfig& config);

struct TomographyResult {
    ChiMatrix chi;
    double gamma = 0.0;
    double tau = 0.0;
};

/// Process tomography of the noisy CR_{pi/2} gate.
TomographyResult run_tomography(const RunConfig& config);

struct KerrcatResult {
    KerrRunResult run;
    std::vector<Eigen::MatrixXd> wigner_fields; // leading corner columns
    Eigen::VectorXd axis;
};

KerrcatResult run_kerrcat(const RunConfig& config);

} // namespace cornersim
