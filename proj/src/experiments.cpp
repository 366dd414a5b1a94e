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

#include "cornersim/experiments.hpp"

#include <json.hpp>

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "cornersim/io.hpp"
#include "cornersim/parallel.hpp"

namespace cornersim {

using json = nlohmann::ordered_json;

namespace {

const std::set<std::string> kExperiments = {"qft", "scaling", "sweep", "benchmark", "tomography",
                                            "kerrcat"};
const std::set<std::string> kNoises = {"decay", "dephasing", "collective", "none"};
const std::set<std::string> kInitialStates = {"ghz_preimage", "bitstring", "random_basis"};

NoiseModel make_noise(const std::string& type, HilbertSpec h, double gamma) {
    if (type == "decay") return local_decay(h, gamma);
    if (type == "dephasing") return local_dephasing(h, gamma);
    if (type == "collective") return collective_dephasing(h, gamma);
    if (type == "none") return NoiseModel::none(h);
    throw ConfigError("unknown noise type: " + type);
}

std::int64_t bitstring_to_index(const std::string& bits, int l) {
    if (static_cast<int>(bits.size()) != l) {
        throw ConfigError("bitstring length " + std::to_string(bits.size()) +
                          " does not match L = " + std::to_string(l));
    }
    std::int64_t idx = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') throw ConfigError("bitstring must contain only 0/1");
        idx = (idx << 1) | (c - '0');
    }
    return idx;
}

Vec basis_vector(HilbertSpec h, std::int64_t index) {
    Vec v = Vec::Zero(h.dim);
    v[index] = 1.0;
    return v;
}

Vec initial_vector(const RunConfig& config, HilbertSpec h) {
    if (config.initial_state == "ghz_preimage") return inverse_qft_ghz_state(h.num_qubits);
    if (config.initial_state == "bitstring") {
        return basis_vector(h, bitstring_to_index(config.bitstring, h.num_qubits));
    }
    throw ConfigError("initial_state '" + config.initial_state + "' needs the sweep experiment");
}

/// Spin-up count and barycenter of a computational basis state; |0> = up.
std::pair<double, double> basis_spin_stats(int l, std::int64_t index) {
    int n_up = 0;
    double pos = 0.0;
    for (int site = 1; site <= l; ++site) {
        if (((index >> (l - site)) & 1) == 0) {
            ++n_up;
            pos += site;
        }
    }
    if (n_up == 0) return {0.0, std::numeric_limits<double>::quiet_NaN()};
    return {static_cast<double>(n_up), pos / n_up};
}

void check_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string(name) + " must be positive and finite");
    }
}

} // namespace

void RunConfig::validate() const {
    if (!kExperiments.count(experiment)) throw ConfigError("unknown experiment: " + experiment);
    if (!kNoises.count(noise)) throw ConfigError("unknown noise type: " + noise);
    if (!kInitialStates.count(initial_state)) {
        throw ConfigError("unknown initial_state: " + initial_state);
    }
    if (L < 1 || L > 24) throw ConfigError("L must be in [1, 24]");
    check_positive(delta, "delta");
    check_positive(dt, "dt");
    check_positive(ode_tol, "ode_tol");
    if (!(epsilon > 0.0) || epsilon >= 1.0) throw ConfigError("epsilon must be in (0, 1)");
    if (m_max < 0) throw ConfigError("m_max must be >= 0");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    if (sketch_min < 0) throw ConfigError("sketch_min must be >= 0");
    if (sample_count < 1) throw ConfigError("sample_count must be >= 1");
    if (observer_stride < 1) throw ConfigError("observer_stride must be >= 1");
    if (gamma_over_delta && gamma_t_qft) {
        throw ConfigError("set exactly one of gamma_over_delta and gamma_t_qft, not both");
    }
    // scaling/benchmark/kerrcat carry their own rate lists or defaults
    if (noise != "none" && !gamma_over_delta && !gamma_t_qft && experiment != "benchmark" &&
        experiment != "kerrcat" && experiment != "scaling") {
        throw ConfigError("one of gamma_over_delta or gamma_t_qft is required");
    }
    if (gamma_over_delta && *gamma_over_delta < 0.0) throw ConfigError("gamma_over_delta must be >= 0");
    if (gamma_t_qft && *gamma_t_qft < 0.0) throw ConfigError("gamma_t_qft must be >= 0");
    if (initial_state == "bitstring") bitstring_to_index(bitstring, L);
    if (experiment == "scaling") {
        if (l_list.empty()) throw ConfigError("scaling needs a non-empty l_list");
        for (int l : l_list) {
            if (l < 2 || l > 24) throw ConfigError("scaling l_list entries must be in [2, 24]");
        }
        if (gamma_scaling_list.empty()) throw ConfigError("scaling needs gamma values");
    }
    if (experiment == "tomography" && !gamma_over_delta) {
        throw ConfigError("tomography requires gamma_over_delta");
    }
    if (experiment == "kerrcat") {
        KerrParams params{kerr_k, kerr_omega_c, kerr_drive, kerr_gamma, kerr_kappa, kerr_n_ph};
        params.validate();
        check_positive(kerr_t_final, "kerr_t_final");
        check_positive(kerr_dt, "kerr_dt");
    }
}

StepConfig RunConfig::step_config() const {
    StepConfig cfg;
    cfg.dt = dt;
    cfg.ode_tol = ode_tol;
    cfg.eps = epsilon;
    cfg.m_max = m_max;
    cfg.p_floor = p_floor;
    cfg.jump_col_floor = jump_col_floor;
    cfg.sketch_min = sketch_min;
    cfg.observer_stride = observer_stride;
    return cfg;
}

double RunConfig::resolve_gamma(int l) const {
    if (noise == "none") return 0.0;
    if (gamma_over_delta) return *gamma_over_delta * delta;
    if (gamma_t_qft) return *gamma_t_qft / (qft_duration(l) / delta);
    return 0.0;
}

void apply_execution_config(const RunConfig& config) {
    int n = config.threads;
    if (config.deterministic) n = 1;
    if (n == 0) n = 0; // keep hardware default
    if (n > 0) {
        set_worker_threads(n);
        Eigen::setNbThreads(n);
    } else {
        Eigen::setNbThreads(worker_threads());
    }
}

namespace {

json config_to_json(const RunConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["L"] = c.L;
    j["delta"] = c.delta;
    if (c.gamma_over_delta) j["gamma_over_delta"] = *c.gamma_over_delta;
    if (c.gamma_t_qft) j["gamma_t_qft"] = *c.gamma_t_qft;
    j["noise"] = c.noise;
    j["epsilon"] = c.epsilon;
    j["m_max"] = c.m_max;
    j["dt"] = c.dt;
    j["ode_tol"] = c.ode_tol;
    j["p_floor"] = c.p_floor;
    j["jump_col_floor"] = c.jump_col_floor;
    j["sketch_min"] = c.sketch_min;
    j["initial_state"] = c.initial_state;
    j["bitstring"] = c.bitstring;
    j["sample_count"] = c.sample_count;
    j["seed"] = c.seed;
    j["observer_stride"] = c.observer_stride;
    j["entanglement_cuts"] = c.entanglement_cuts;
    j["output_prefix"] = c.output_prefix;
    j["threads"] = c.threads;
    j["deterministic"] = c.deterministic;
    j["l_list"] = c.l_list;
    j["gamma_scaling_list"] = c.gamma_scaling_list;
    j["benchmark_l_list"] = c.benchmark_l_list;
    j["benchmark_gamma_t"] = c.benchmark_gamma_t;
    j["exact_tol"] = c.exact_tol;
    j["kerr_k"] = c.kerr_k;
    j["kerr_omega_c"] = c.kerr_omega_c;
    j["kerr_drive"] = c.kerr_drive;
    j["kerr_gamma"] = c.kerr_gamma;
    j["kerr_kappa"] = c.kerr_kappa;
    j["kerr_n_ph"] = c.kerr_n_ph;
    j["kerr_t_final"] = c.kerr_t_final;
    j["kerr_dt"] = c.kerr_dt;
    j["wigner_extent"] = c.wigner_extent;
    j["wigner_points"] = c.wigner_points;
    return j;
}

void apply_json(RunConfig& c, const json& j) {
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "experiment") c.experiment = value.get<std::string>();
            else if (key == "L") c.L = value.get<int>();
            else if (key == "delta") c.delta = value.get<double>();
            else if (key == "gamma_over_delta") c.gamma_over_delta = value.get<double>();
            else if (key == "gamma_t_qft") c.gamma_t_qft = value.get<double>();
            else if (key == "noise") c.noise = value.get<std::string>();
            else if (key == "epsilon") c.epsilon = value.get<double>();
            else if (key == "m_max") c.m_max = value.get<int>();
            else if (key == "dt") c.dt = value.get<double>();
            else if (key == "ode_tol") c.ode_tol = value.get<double>();
            else if (key == "p_floor") c.p_floor = value.get<double>();
            else if (key == "jump_col_floor") c.jump_col_floor = value.get<double>();
            else if (key == "sketch_min") c.sketch_min = value.get<int>();
            else if (key == "initial_state") c.initial_state = value.get<std::string>();
            else if (key == "bitstring") c.bitstring = value.get<std::string>();
            else if (key == "sample_count") c.sample_count = value.get<int>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "observer_stride") c.observer_stride = value.get<int>();
            else if (key == "entanglement_cuts") c.entanglement_cuts = value.get<bool>();
            else if (key == "output_prefix") c.output_prefix = value.get<std::string>();
            else if (key == "threads") c.threads = value.get<int>();
            else if (key == "deterministic") c.deterministic = value.get<bool>();
            else if (key == "l_list") c.l_list = value.get<std::vector<int>>();
            else if (key == "gamma_scaling_list")
                c.gamma_scaling_list = value.get<std::vector<double>>();
            else if (key == "benchmark_l_list") c.benchmark_l_list = value.get<std::vector<int>>();
            else if (key == "benchmark_gamma_t") c.benchmark_gamma_t = value.get<double>();
            else if (key == "exact_tol") c.exact_tol = value.get<double>();
            else if (key == "kerr_k") c.kerr_k = value.get<double>();
            else if (key == "kerr_omega_c") c.kerr_omega_c = value.get<double>();
            else if (key == "kerr_drive") c.kerr_drive = value.get<double>();
            else if (key == "kerr_gamma") c.kerr_gamma = value.get<double>();
            else if (key == "kerr_kappa") c.kerr_kappa = value.get<double>();
            else if (key == "kerr_n_ph") c.kerr_n_ph = value.get<int>();
            else if (key == "kerr_t_final") c.kerr_t_final = value.get<double>();
            else if (key == "kerr_dt") c.kerr_dt = value.get<double>();
            else if (key == "wigner_extent") c.wigner_extent = value.get<double>();
            else if (key == "wigner_points") c.wigner_points = value.get<int>();
            else throw ConfigError("unknown config key: " + key);
        } catch (const json::exception& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
}

} // namespace

std::string RunConfig::to_json_string() const { return config_to_json(*this).dump(2) + "\n"; }

RunConfig RunConfig::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    RunConfig c;
    apply_json(c, j);
    return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

void RunConfig::merge_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    apply_json(*this, j);
}

namespace {

void write_qft_outputs(const RunConfig& config, const QftRunResult& r) {
    if (config.output_prefix.empty()) return;
    CsvWriter csv(config.output_prefix + "_timeseries.csv");
    std::vector<std::string> head = {"t", "M", "S", "exp_S", "trace_drift"};
    const int cuts = config.entanglement_cuts ? r.L - 1 : 0;
    for (int n = 1; n <= cuts; ++n) head.push_back("S_ent_" + std::to_string(n));
    head.push_back("segment"); // gate-boundary annotation
    csv.header(head);
    for (const TimeSample& s : r.series) {
        std::vector<std::string> row = {format_double(s.t), std::to_string(s.m),
                                        format_double(s.entropy), format_double(std::exp(s.entropy)),
                                        format_double(s.trace_drift)};
        for (double v : s.entanglement) row.push_back(format_double(v));
        row.push_back(s.segment_label);
        csv.row(row);
    }
    write_text_file(config.output_prefix + "_schedule.txt",
                    serialize_schedule(qft_schedule(r.L, config.delta)));

    json j;
    j["L"] = r.L;
    j["gamma_over_delta"] = r.gamma;
    j["gamma_T"] = r.gamma_t;
    j["epsilon"] = config.epsilon;
    j["fidelity_to_ideal"] = r.fidelity_to_ideal;
    j["n_S"] = r.n_up;
    if (std::isfinite(r.barycenter)) j["B"] = r.barycenter;
    else j["B"] = nullptr;
    j["wall_time_s"] = r.wall_time_s;
    j["max_M"] = r.max_corner_dim;
    j["final_entropy"] = r.final_entropy;
    j["trace_drift"] = r.trace_drift;
    j["eps_unreachable"] = r.eps_unreachable;
    j["T_qft"] = r.t_qft;
    write_text_file(config.output_prefix + "_result.json", j.dump(2) + "\n");
}

} // namespace

QftRunResult run_qft(const RunConfig& config) {
    config.validate();
    apply_execution_config(config);
    using clock = std::chrono::steady_clock;

    HilbertSpec h = HilbertSpec::qubits(config.L);
    GateSchedule schedule = qft_schedule(config.L, config.delta);
    const double gamma = config.resolve_gamma(config.L);
    NoiseModel noise = make_noise(config.noise, h, gamma);
    Vec psi_in = initial_vector(config, h);
    Vec ideal = ideal_output(schedule, psi_in);

    // Segment boundaries for gate annotations in the time series.
    std::vector<std::pair<double, std::string>> boundaries;
    double acc = 0.0;
    for (const Segment& seg : schedule.segments) {
        acc += seg.duration;
        boundaries.emplace_back(acc, seg.label);
    }
    auto segment_at = [&](double t) -> std::string {
        for (const auto& [end, label] : boundaries) {
            if (t <= end + 1e-12) return label;
        }
        return boundaries.back().second;
    };

    QftRunResult result;
    result.L = config.L;
    result.gamma = gamma;
    result.t_qft = schedule.total_duration();
    result.gamma_t = gamma * result.t_qft;

    StepConfig cfg = config.step_config();
    const auto t0 = clock::now();
    int max_m = 1;
    StepObserver observer = [&](const CornerBasis& state) {
        max_m = std::max(max_m, state.rank());
        TimeSample sample;
        sample.t = state.t;
        sample.m = state.rank();
        sample.entropy = von_neumann_entropy(state);
        sample.trace_drift = state.trace_drift;
        sample.segment_label = state.t == 0.0 ? "initial" : segment_at(state.t);
        if (config.entanglement_cuts) {
            sample.entanglement.reserve(config.L - 1);
            for (int n = 1; n < config.L; ++n) {
                sample.entanglement.push_back(entanglement_entropy(state, n));
            }
        }
        result.series.push_back(std::move(sample));
    };
    CornerBasis final_state =
        evolve_schedule(from_pure_state(h, psi_in), schedule, noise, cfg, observer);
    const auto t1 = clock::now();

    result.fidelity_to_ideal = fidelity_to_pure(final_state, ideal);
    result.final_entropy = von_neumann_entropy(final_state);
    SpinStatistics stats = spin_statistics(final_state);
    result.n_up = stats.n_up;
    result.barycenter = stats.barycenter;
    result.max_corner_dim = max_m;
    result.trace_drift = final_state.trace_drift;
    result.eps_unreachable = final_state.eps_unreachable;
    result.wall_time_s =
        config.deterministic ? 0.0 : std::chrono::duration<double>(t1 - t0).count();

    write_qft_outputs(config, result);
    return result;
}

ScalingResult run_scaling(const RunConfig& config) {
    config.validate();
    apply_execution_config(config);

    struct StateSpec {
        std::string name;
        bool all_gammas;
    };
    const std::vector<StateSpec> states = {{"ghz_preimage", true}, {"all_up", false},
                                           {"all_down", false}};

    ScalingResult result;
    for (const StateSpec& st : states) {
        for (double god : config.gamma_scaling_list) {
            if (!st.all_gammas && god != config.gamma_scaling_list.front()) continue;
            for (int l : config.l_list) {
                RunConfig point = config;
                point.experiment = "qft";
                point.L = l;
                point.gamma_over_delta = god;
                point.gamma_t_qft.reset();
                point.output_prefix.clear();
                if (st.name == "ghz_preimage") {
                    point.initial_state = "ghz_preimage";
                } else {
                    point.initial_state = "bitstring";
                    point.bitstring = std::string(l, st.name == "all_up" ? '0' : '1');
                }
                QftRunResult run = run_qft(point);
                result.points.push_back(
                    ScalingPoint{st.name, god, l, 1.0 - run.fidelity_to_ideal});
            }
            // log-log fit of infidelity against L
            Eigen::MatrixXd design(config.l_list.size(), 2);
            Eigen::VectorXd rhs(config.l_list.size());
            Eigen::Index row = 0;
            for (const ScalingPoint& p : result.points) {
                if (p.state != st.name || p.gamma_over_delta != god) continue;
                design(row, 0) = std::log(static_cast<double>(p.L));
                design(row, 1) = 1.0;
                rhs(row) = std::log(std::max(p.infidelity, 1e-300));
                ++row;
            }
            Eigen::Vector2d x =
                design.topRows(row).colPivHouseholderQr().solve(rhs.head(row));
            result.fits.push_back(ScalingFit{st.name, god, x[0], x[1]});
        }
    }

    if (!config.output_prefix.empty()) {
        CsvWriter csv(config.output_prefix + "_scaling.csv");
        csv.header({"state", "gamma_over_delta", "L", "infidelity"});
        for (const ScalingPoint& p : result.points) {
            csv.row({p.state, format_double(p.gamma_over_delta), std::to_string(p.L),
                     format_double(p.infidelity)});
        }
        json j = json::array();
        for (const ScalingFit& f : result.fits) {
            j.push_back({{"state", f.state},
                         {"gamma_over_delta", f.gamma_over_delta},
                         {"slope", f.slope},
                         {"intercept", f.intercept}});
        }
        write_text_file(config.output_prefix + "_scaling_fits.json", j.dump(2) + "\n");
    }
    return result;
}

SweepResult run_sweep(const RunConfig& config) {
    config.validate();
    apply_execution_config(config);

    HilbertSpec h = HilbertSpec::qubits(config.L);
    GateSchedule schedule = qft_schedule(config.L, config.delta);
    const double gamma = config.resolve_gamma(config.L);

    // Seeded sampling of basis states without replacement.
    std::mt19937_64 rng(config.seed);
    std::vector<std::int64_t> indices;
    const std::int64_t n = h.dim;
    if (config.sample_count >= n) {
        indices.resize(n);
        for (std::int64_t i = 0; i < n; ++i) indices[i] = i;
    } else {
        std::set<std::int64_t> chosen;
        std::uniform_int_distribution<std::int64_t> dist(0, n - 1);
        while (static_cast<int>(chosen.size()) < config.sample_count) chosen.insert(dist(rng));
        indices.assign(chosen.begin(), chosen.end());
        std::shuffle(indices.begin(), indices.end(), rng);
    }

    StepConfig cfg = config.step_config();
    auto sweep_noise = [&](const std::string& type) {
        NoiseModel noise = make_noise(type, h, gamma);
        std::vector<SweepRecord> records(indices.size());
        parallel_for(static_cast<std::int64_t>(indices.size()), [&](std::int64_t i) {
            const std::int64_t idx = indices[i];
            Vec psi = basis_vector(h, idx);
            Vec ideal = ideal_output(schedule, psi);
            CornerBasis final_state =
                evolve_schedule(from_pure_state(h, psi), schedule, noise, cfg);
            auto [n_up, bary] = basis_spin_stats(config.L, idx);
            records[i] =
                SweepRecord{idx, n_up, bary, 1.0 - fidelity_to_pure(final_state, ideal)};
        });
        return records;
    };

    SweepResult result;
    result.decay_records = sweep_noise("decay");
    result.dephasing_records = sweep_noise("dephasing");

    auto fit_defined = [](const std::vector<SweepRecord>& records) {
        std::vector<SweepRecord> defined;
        for (const auto& r : records) {
            if (std::isfinite(r.barycenter)) defined.push_back(r);
        }
        return bilinear_fit(defined);
    };
    result.decay_fit = fit_defined(result.decay_records);
    result.dephasing_fit = fit_defined(result.dephasing_records);

    if (!config.output_prefix.empty()) {
        for (const auto& [name, records] :
             {std::pair{"decay", &result.decay_records},
              std::pair{"dephasing", &result.dephasing_records}}) {
            CsvWriter csv(config.output_prefix + "_sweep_" + name + ".csv");
            csv.comment("prng: " + result.prng + " seed: " + std::to_string(config.seed));
            csv.header({"basis_index", "n_S", "B", "infidelity"});
            for (const SweepRecord& r : *records) {
                csv.row({std::to_string(r.basis_index), format_double(r.n_up),
                         format_double(r.barycenter), format_double(r.infidelity)});
            }
        }
        json j;
        for (const auto& [name, fit] : {std::pair{"decay", &result.decay_fit},
                                        std::pair{"dephasing", &result.dephasing_fit}}) {
            j[name] = {{"a", fit->a},           {"n_S0", fit->n_s0},
                       {"B_0", fit->b_0},       {"I_0", fit->i_0},
                       {"rms", fit->rms_residual}};
        }
        j["prng"] = result.prng;
        j["seed"] = config.seed;
        write_text_file(config.output_prefix + "_sweep_fits.json", j.dump(2) + "\n");
    }
    return result;
}

std::vector<BenchmarkResult> run_benchmark(const RunConfig& config) {
    config.validate();
    apply_execution_config(config);
    const double gamma_t =
        config.gamma_t_qft ? *config.gamma_t_qft : config.benchmark_gamma_t;
    std::vector<BenchmarkResult> results;
    for (int l : config.benchmark_l_list) {
        results.push_back(
            benchmark_pair(l, gamma_t, config.epsilon, config.step_config(), config.exact_tol));
    }
    if (!config.output_prefix.empty()) {
        CsvWriter csv(config.output_prefix + "_benchmark.csv");
        csv.header({"L", "epsilon", "t_corner_s", "t_exact_s", "fidelity_cross"});
        for (const BenchmarkResult& r : results) {
            csv.row({std::to_string(r.L), format_double(r.epsilon), format_double(r.t_corner_s),
                     format_double(r.t_exact_s), format_double(r.fidelity_cross)});
        }
    }
    return results;
}

TomographyResult run_tomography(const RunConfig& config) {
    config.validate();
    apply_execution_config(config);
    HilbertSpec h = HilbertSpec::qubits(2);
    GateSchedule gate(h);
    gate.append(controlled_phase_segment(h, 1, 2, M_PI / 2.0, config.delta));
    const double gamma = *config.gamma_over_delta * config.delta;
    NoiseModel noise = make_noise(config.noise, h, gamma);

    TomographyResult result;
    result.gamma = gamma;
    result.tau = gate.total_duration();
    Mat choi = channel_from_evolution(gate, noise, config.exact_tol * 1e-2);
    result.chi = error_chi(choi, gate, gamma * result.tau);

    if (!config.output_prefix.empty()) {
        CsvWriter csv(config.output_prefix + "_chi.csv");
        csv.comment("|chi_mn| / (gamma tau), chi_11 zeroed; gamma tau = " +
                    format_double(result.chi.gamma_tau));
        std::vector<std::string> head = {"pauli"};
        for (int nidx = 0; nidx < 16; ++nidx) head.push_back(pauli_label(nidx));
        csv.header(head);
        Eigen::MatrixXd rep = result.chi.report();
        for (int m = 0; m < 16; ++m) {
            std::vector<std::string> row = {pauli_label(m)};
            for (int nidx = 0; nidx < 16; ++nidx) row.push_back(format_double(rep(m, nidx)));
            csv.row(row);
        }
    }
    return result;
}

KerrcatResult run_kerrcat(const RunConfig& config) {
    config.validate();
    apply_execution_config(config);
    KerrParams params{config.kerr_k, config.kerr_omega_c, config.kerr_drive,
                      config.kerr_gamma, config.kerr_kappa, config.kerr_n_ph};
    StepConfig cfg = config.step_config();
    cfg.dt = config.kerr_dt;

    KerrcatResult result;
    result.run = run_kerr_cat(params, config.kerr_t_final, cfg);
    result.axis = wigner_axis(config.wigner_extent, config.wigner_points);
    const int leading = std::min(4, result.run.state.rank());
    for (int k = 0; k < leading; ++k) {
        Vec column = result.run.state.C.col(k) / std::sqrt(result.run.state.p[k]);
        result.wigner_fields.push_back(wigner(column, result.axis, result.axis));
    }

    if (!config.output_prefix.empty()) {
        for (int k = 0; k < leading; ++k) {
            CsvWriter csv(config.output_prefix + "_wigner_" + std::to_string(k + 1) + ".csv");
            csv.comment("p_k = " + format_double(result.run.state.p[k]) +
                        "  parity = " + format_double(result.run.column_parity[k]));
            csv.header({"re_alpha", "im_alpha", "W"});
            const auto& w = result.wigner_fields[k];
            for (Eigen::Index ix = 0; ix < result.axis.size(); ++ix) {
                for (Eigen::Index iy = 0; iy < result.axis.size(); ++iy) {
                    csv.row_values({result.axis[ix], result.axis[iy], w(ix, iy)});
                }
            }
        }
        json j;
        j["max_M"] = result.run.max_corner_dim;
        j["mean_photons"] = result.run.mean_photons;
        j["tail_population"] = result.run.tail_population;
        j["p"] = std::vector<double>(result.run.state.p.data(),
                                     result.run.state.p.data() + result.run.state.p.size());
        j["column_parity"] = result.run.column_parity;
        j["substeps"] = result.run.substep_stats.substeps;
        j["substep_rejections"] = result.run.substep_stats.rejections;
        j["min_tau"] = result.run.substep_stats.min_tau;
        j["max_tau"] = result.run.substep_stats.max_tau;
        write_text_file(config.output_prefix + "_kerrcat.json", j.dump(2) + "\n");
    }
    return result;
}

} // namespace cornersim
