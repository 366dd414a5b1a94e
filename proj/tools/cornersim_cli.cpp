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

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "cornersim/experiments.hpp"
#include "cornersim/io.hpp"

namespace {

using namespace cornersim;

int dispatch(RunConfig& config, const std::string& config_file) {
    if (!config_file.empty()) config.merge_json_file(config_file);
    config.validate();

    if (config.experiment == "qft") {
        QftRunResult r = run_qft(config);
        std::printf("L=%d gamma/delta=%s gamma*T=%s  F(rho_c, rho_0)=%.6f  max_M=%d  S=%.4f\n",
                    r.L, format_double(r.gamma).c_str(), format_double(r.gamma_t).c_str(),
                    r.fidelity_to_ideal, r.max_corner_dim, r.final_entropy);
        if (r.eps_unreachable) {
            std::fprintf(stderr, "warning: eps budget unreachable under m_max\n");
            return 3;
        }
    } else if (config.experiment == "scaling") {
        ScalingResult r = run_scaling(config);
        for (const ScalingFit& f : r.fits) {
            std::printf("state=%-12s gamma/delta=%-10s slope=%.3f\n", f.state.c_str(),
                        format_double(f.gamma_over_delta).c_str(), f.slope);
        }
    } else if (config.experiment == "sweep") {
        SweepResult r = run_sweep(config);
        std::printf("decay:     a=%+.3e n_S0=%.3f B_0=%.3f I_0=%.3e rms=%.2e\n", r.decay_fit.a,
                    r.decay_fit.n_s0, r.decay_fit.b_0, r.decay_fit.i_0,
                    r.decay_fit.rms_residual);
        std::printf("dephasing: a=%+.3e n_S0=%.3f B_0=%.3f I_0=%.3e rms=%.2e\n",
                    r.dephasing_fit.a, r.dephasing_fit.n_s0, r.dephasing_fit.b_0,
                    r.dephasing_fit.i_0, r.dephasing_fit.rms_residual);
    } else if (config.experiment == "benchmark") {
        for (const BenchmarkResult& b : run_benchmark(config)) {
            std::printf("L=%-3d eps=%-8s t_corner=%8.2fs t_exact=%8.2fs speedup=%6.1fx F=%.6f\n",
                        b.L, format_double(b.epsilon).c_str(), b.t_corner_s, b.t_exact_s,
                        b.t_exact_s / b.t_corner_s, b.fidelity_cross);
        }
    } else if (config.experiment == "tomography") {
        TomographyResult r = run_tomography(config);
        Eigen::MatrixXd rep = r.chi.report();
        std::printf("chi^err / (gamma tau), gamma tau = %s; leading entries:\n",
                    format_double(r.gamma * r.tau).c_str());
        for (int m = 0; m < 16; ++m) {
            for (int n = 0; n < 16; ++n) {
                if (rep(m, n) > 1e-3) {
                    std::printf("  (%s,%s) = %.4e\n", pauli_label(m).c_str(),
                                pauli_label(n).c_str(), rep(m, n));
                }
            }
        }
    } else if (config.experiment == "kerrcat") {
        KerrcatResult r = run_kerrcat(config);
        std::printf("kerr-cat: max_M=%d  mean_photons=%.3f  tail=%.2e  substeps=%ld\n",
                    r.run.max_corner_dim, r.run.mean_photons, r.run.tail_population,
                    r.run.substep_stats.substeps);
        for (int k = 0; k < r.run.state.rank() && k < 4; ++k) {
            std::printf("  p_%d=%.4f  <parity>=%+.4f\n", k + 1, r.run.state.p[k],
                        r.run.column_parity[k]);
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"continuous-time corner-space simulation of noisy quantum circuits"};
    app.require_subcommand(1);

    RunConfig config;
    std::string config_file;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_file, "JSON config file (overrides flags)");
        cmd->add_option("-L,--qubits", config.L, "register size");
        cmd->add_option("--delta", config.delta, "Rabi frequency (time unit)");
        cmd->add_option("--gamma-over-delta", [&](const std::vector<std::string>& v) {
            config.gamma_over_delta = std::stod(v[0]);
            return true;
        }, "dissipation rate relative to delta");
        cmd->add_option("--gamma-t-qft", [&](const std::vector<std::string>& v) {
            config.gamma_t_qft = std::stod(v[0]);
            return true;
        }, "target gamma * T_qft (resolved via the schedule duration)");
        cmd->add_option("--noise", config.noise, "decay|dephasing|collective|none");
        cmd->add_option("--epsilon", config.epsilon, "per-step truncation budget");
        cmd->add_option("--m-max", config.m_max, "corner dimension cap (0 = uncapped)");
        cmd->add_option("--dt", config.dt, "outer time step (1/delta units)");
        cmd->add_option("--ode-tol", config.ode_tol, "coherent substep tolerance");
        cmd->add_option("--jump-col-floor", config.jump_col_floor,
                        "relative floor for pruning near-empty jump columns (0 = off)");
        cmd->add_option("--sketch-min", config.sketch_min,
                        "randomized truncation oversampling margin (0 = exact Gram)");
        cmd->add_option("--initial-state", config.initial_state,
                        "ghz_preimage|bitstring|random_basis");
        cmd->add_option("--bitstring", config.bitstring, "basis state, qubit 1 first");
        cmd->add_option("--samples", config.sample_count, "sweep sample count");
        cmd->add_option("--seed", config.seed, "PRNG seed");
        cmd->add_option("--stride", config.observer_stride, "time-series sampling stride");
        cmd->add_flag("--entanglement-cuts", config.entanglement_cuts,
                      "record S_ent for every bipartition");
        cmd->add_option("-o,--output", config.output_prefix, "output file prefix");
        cmd->add_option("--threads", config.threads, "worker threads (0 = hardware)");
        cmd->add_flag("--deterministic", config.deterministic,
                      "serial reductions, byte-identical outputs");
        cmd->add_option("--exact-tol", config.exact_tol, "dense-oracle integrator tolerance");
    };

    CLI::App* qft = app.add_subcommand("qft", "noisy QFT run with time series");
    add_common(qft);
    CLI::App* scaling = app.add_subcommand("scaling", "infidelity scaling over L");
    add_common(scaling);
    scaling->add_option("--l-list", config.l_list, "L values");
    scaling->add_option("--gamma-list", config.gamma_scaling_list, "gamma/delta values");
    CLI::App* sweep = app.add_subcommand("sweep", "initial-state sweep with bilinear fits");
    add_common(sweep);
    CLI::App* benchmark = app.add_subcommand("benchmark", "corner vs exact wall-time pairs");
    add_common(benchmark);
    benchmark->add_option("--benchmark-l-list", config.benchmark_l_list, "L values");
    benchmark->add_option("--benchmark-gamma-t", config.benchmark_gamma_t, "gamma * T_qft");
    CLI::App* tomo = app.add_subcommand("tomography", "process tomography of noisy CR_pi/2");
    add_common(tomo);
    CLI::App* kerr = app.add_subcommand("kerrcat", "driven Kerr resonator corner run");
    add_common(kerr);
    kerr->add_option("--kerr-k", config.kerr_k, "Kerr nonlinearity / gamma");
    kerr->add_option("--kerr-omega-c", config.kerr_omega_c, "cavity frequency / gamma");
    kerr->add_option("--kerr-drive", config.kerr_drive, "two-photon drive / gamma");
    kerr->add_option("--kerr-kappa", config.kerr_kappa, "two-photon loss / gamma");
    kerr->add_option("--kerr-n-ph", config.kerr_n_ph, "Fock cutoff");
    kerr->add_option("--kerr-t-final", config.kerr_t_final, "final time (1/gamma units)");
    kerr->add_option("--kerr-dt", config.kerr_dt, "outer step (1/gamma units)");
    kerr->add_option("--wigner-extent", config.wigner_extent, "phase-space half width");
    kerr->add_option("--wigner-points", config.wigner_points, "grid points per axis");
    CLI::App* validate = app.add_subcommand("validate-config", "parse, validate and echo config");
    add_common(validate);

    CLI11_PARSE(app, argc, argv);

    for (auto* cmd : {qft, scaling, sweep, benchmark, tomo, kerr}) {
        if (cmd->parsed()) config.experiment = cmd->get_name();
    }

    try {
        if (validate->parsed()) {
            if (!config_file.empty()) config.merge_json_file(config_file);
            config.validate();
            std::cout << config.to_json_string();
            return 0;
        }
        return dispatch(config, config_file);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NumericalFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const IntegratorFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
