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

#include <filesystem>
#include <fstream>
#include <set>

#include "cornersim/experiments.hpp"

using namespace cornersim;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct TempDir {
    std::filesystem::path dir;
    TempDir() {
        dir = std::filesystem::temp_directory_path() /
              ("cornersim_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(dir);
    }
    ~TempDir() { std::filesystem::remove_all(dir); }
    std::string prefix(const std::string& name) const { return (dir / name).string(); }
};

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("config validation reports precise failures") {
    RunConfig c;
    c.experiment = "qft";
    c.gamma_over_delta = 1e-3;
    CHECK_NOTHROW(c.validate());

    RunConfig bad = c;
    bad.experiment = "warp";
    CHECK_THROWS_WITH_AS(bad.validate(), "unknown experiment: warp", ConfigError);

    bad = c;
    bad.gamma_t_qft = 0.1; // both gamma specs
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = c;
    bad.gamma_over_delta.reset();
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = c;
    bad.epsilon = 2.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = c;
    bad.initial_state = "bitstring";
    bad.bitstring = "01"; // length != L
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = c;
    bad.noise = "thermal";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("config JSON round-trip is idempotent") {
    RunConfig c;
    c.experiment = "sweep";
    c.L = 6;
    c.gamma_t_qft = 2.5e-2;
    c.noise = "dephasing";
    c.epsilon = 3.14e-5;
    c.sample_count = 17;
    c.seed = 987654321u;
    c.bitstring = "010101";
    c.l_list = {4, 5, 6};

    const std::string once = c.to_json_string();
    RunConfig parsed = RunConfig::from_json_string(once);
    const std::string twice = parsed.to_json_string();
    CHECK(once == twice);
    CHECK(parsed.L == 6);
    CHECK(parsed.gamma_t_qft.has_value());
    CHECK(*parsed.gamma_t_qft == 2.5e-2);
    CHECK_FALSE(parsed.gamma_over_delta.has_value());
}

TEST_CASE("unknown config keys are rejected by name") {
    CHECK_THROWS_WITH_AS(RunConfig::from_json_string(R"({"qubitz": 4})"),
                         "unknown config key: qubitz", ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json_string("{nonsense"), ConfigError);
}

TEST_CASE("gamma resolution picks the configured parameterization") {
    RunConfig c;
    c.gamma_over_delta = 2e-3;
    CHECK(c.resolve_gamma(8) == doctest::Approx(2e-3));
    c.gamma_over_delta.reset();
    c.gamma_t_qft = 2.5e-2;
    CHECK(c.resolve_gamma(8) == doctest::Approx(2.5e-2 / qft_duration(8)));
    c.noise = "none";
    CHECK(c.resolve_gamma(8) == 0.0);
}

TEST_CASE("deterministic qft runs produce byte-identical outputs") {
    TempDir tmp;
    RunConfig c;
    c.experiment = "qft";
    c.L = 3;
    c.gamma_over_delta = 2e-3;
    c.epsilon = 1e-5;
    c.dt = 0.1;
    c.deterministic = true;
    c.entanglement_cuts = true;
    c.observer_stride = 3;

    c.output_prefix = tmp.prefix("run_a");
    run_qft(c);
    c.output_prefix = tmp.prefix("run_b");
    run_qft(c);

    CHECK(slurp(tmp.prefix("run_a") + "_result.json") ==
          slurp(tmp.prefix("run_b") + "_result.json"));
    CHECK(slurp(tmp.prefix("run_a") + "_timeseries.csv") ==
          slurp(tmp.prefix("run_b") + "_timeseries.csv"));
    // wall time is suppressed so the record can be byte-stable
    CHECK(slurp(tmp.prefix("run_a") + "_result.json").find("\"wall_time_s\": 0.0") !=
          std::string::npos);
}

TEST_CASE("qft run reports the fields of the result record") {
    RunConfig c;
    c.experiment = "qft";
    c.L = 3;
    c.noise = "none";
    c.dt = 0.1;
    c.epsilon = 1e-6;
    QftRunResult r = run_qft(c);
    CHECK(r.fidelity_to_ideal >= 1.0 - 1e-7); // noiseless limit
    CHECK(r.max_corner_dim == 1);
    CHECK(r.gamma == 0.0);
    CHECK(r.t_qft == doctest::Approx(qft_duration(3)));
    CHECK_FALSE(r.series.empty());
    CHECK(r.series.front().segment_label == "initial");
}

TEST_CASE("sweep sampling is seeded, without replacement, and fits both channels") {
    TempDir tmp;
    RunConfig c;
    c.experiment = "sweep";
    c.L = 4;
    c.gamma_t_qft = 2.5e-2;
    c.epsilon = 1e-5;
    c.dt = 0.1;
    c.sample_count = 12;
    c.seed = 2024;
    c.output_prefix = tmp.prefix("sweep");
    SweepResult r = run_sweep(c);
    REQUIRE(r.decay_records.size() == 12);
    REQUIRE(r.dephasing_records.size() == 12);

    std::set<std::int64_t> seen;
    for (const auto& rec : r.decay_records) {
        CHECK(rec.basis_index >= 0);
        CHECK(rec.basis_index < 16);
        seen.insert(rec.basis_index);
    }
    CHECK(seen.size() == 12); // without replacement

    SweepResult again = run_sweep(c);
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(again.decay_records[i].basis_index == r.decay_records[i].basis_index);
    }
    CHECK(std::filesystem::exists(tmp.prefix("sweep") + "_sweep_decay.csv"));
    CHECK(std::filesystem::exists(tmp.prefix("sweep") + "_sweep_fits.json"));
}

TEST_CASE("noisy QFT time series: M bounded, exp(S) within the support bound") {
    // transient structure of the register run: entropy and corner
    // dimension grow together, with exp(S) <= M at every sample
    RunConfig c;
    c.experiment = "qft";
    c.L = 6;
    c.gamma_over_delta = 1e-3;
    c.epsilon = 1e-4;
    c.dt = 0.1;
    c.observer_stride = 10;
    c.entanglement_cuts = true;
    c.sketch_min = 32;
    c.jump_col_floor = 0.3;
    QftRunResult r = run_qft(c);
    REQUIRE(r.series.size() > 5);
    int max_m = 0;
    for (const TimeSample& s : r.series) {
        CHECK(std::exp(s.entropy) <= s.m + 1e-9);
        max_m = std::max(max_m, s.m);
    }
    CHECK(max_m > 1);
    CHECK(max_m < 64); // stays desk-scale finite
    CHECK(r.final_entropy > 0.0);
    // entanglement builds up across the run
    const auto& first = r.series.front().entanglement;
    const auto& last = r.series.back().entanglement;
    REQUIRE(first.size() == 5);
    CHECK(last[2] > first[2] + 0.05);
    // gate labels annotate the samples
    bool saw_hadamard = false, saw_cphase = false;
    for (const TimeSample& s : r.series) {
        saw_hadamard |= s.segment_label.rfind("hadamard", 0) == 0;
        saw_cphase |= s.segment_label.rfind("cphase", 0) == 0;
    }
    CHECK(saw_hadamard);
    CHECK(saw_cphase);
}

TEST_CASE("scaling runner fits a slope per state and gamma") {
    RunConfig c;
    c.experiment = "scaling";
    c.l_list = {2, 3, 4};
    c.gamma_scaling_list = {1e-3};
    c.epsilon = 1e-5;
    c.dt = 0.1;
    ScalingResult r = run_scaling(c);
    CHECK(r.points.size() == 9); // 3 states x 3 L
    CHECK(r.fits.size() == 3);
    for (const ScalingFit& f : r.fits) {
        CHECK(std::isfinite(f.slope));
    }
}

TEST_CASE("tomography runner emits the labeled chi report") {
    TempDir tmp;
    RunConfig c;
    c.experiment = "tomography";
    c.noise = "dephasing";
    c.gamma_over_delta = 1e-3;
    c.output_prefix = tmp.prefix("tomo");
    TomographyResult r = run_tomography(c);
    CHECK(r.tau == doctest::Approx(M_PI / 2.0));
    const std::string csv = slurp(tmp.prefix("tomo") + "_chi.csv");
    CHECK(csv.find("ZZ") != std::string::npos);
    CHECK(csv.find("gamma tau") != std::string::npos);
}

TEST_CASE("kerrcat runner writes wigner fields with weights in the header") {
    TempDir tmp;
    RunConfig c;
    c.experiment = "kerrcat";
    c.noise = "none"; // ignored by the kerr model
    c.kerr_n_ph = 12;
    c.kerr_drive = 20.0;
    c.kerr_t_final = 0.2;
    c.kerr_dt = 5e-4;
    c.wigner_points = 11;
    c.wigner_extent = 3.0;
    c.output_prefix = tmp.prefix("kerr");
    KerrcatResult r = run_kerrcat(c);
    CHECK(r.run.state.rank() >= 1);
    CHECK(std::filesystem::exists(tmp.prefix("kerr") + "_wigner_1.csv"));
    const std::string csv = slurp(tmp.prefix("kerr") + "_wigner_1.csv");
    CHECK(csv.find("# p_k = ") != std::string::npos);
    CHECK(std::filesystem::exists(tmp.prefix("kerr") + "_kerrcat.json"));
}

} // TEST_SUITE
