// Copyright 2026 The rdtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Experiment runner behind the command-line tool. Every command is a pure
// function of the configuration (including its seed) to output files.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rdtomo/estimator.hpp"
#include "rdtomo/gaussian_state.hpp"
#include "rdtomo/scan_simulator.hpp"
#include "rdtomo/transfer.hpp"

namespace rdtomo {

struct GridSpec {
    double start = -8.0;
    double end = 8.0;
    std::size_t count = 401;

    std::vector<double> points() const { return linspace(start, end, count); }
};

/// Parses "start:end:count" with count >= 2.
GridSpec parse_grid(const std::string& text);

struct DcConfig {
    std::size_t points = 2001;
    DcOptions options;
};

struct FitConfig {
    Weighting weighting = Weighting::Model;
    bool psd_projection = false;
    bool subtract_vacuum = true;
    double electronic_noise = 0.0;
    bool free_f2 = false;  // fit f2 from the DC curve instead of taking the resonator value
};

struct PhiSweepConfig {
    std::size_t count = 14;
    double s = 31.3;
    double excess_p = 0.0;
    double excess_q = 0.0;
};

using StateSpec = std::variant<PhaseModSpec, TwoModeGaussian>;

struct RunConfig {
    ResonatorParams resonator;
    ScanConfig scan;
    StateSpec state = default_state();
    GridSpec grid;
    DcConfig dc;
    FitConfig fit;
    PhiSweepConfig phi_sweep;
    std::size_t roundtrip_seeds = 1;
    Basis basis = Basis::SymAntisym;
    bool normalized = true;
    std::uint64_t seed = 0;
    std::filesystem::path out = "out";

    void validate() const;
    TwoModeGaussian truth() const;

    /// S/A means (-0.6, 2.2, 11.8, 0.2), sideband variances (1.25, 1.28, 1.28, 1.25).
    static TwoModeGaussian default_state();
};

/// Reads a JSON configuration; relative file references resolve against base_dir.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const RunConfig& config);

TwoModeGaussian parse_state_json(const nlohmann::json& j);
nlohmann::json state_to_json(const TwoModeGaussian& state);

Calibration parse_calibration_json(const nlohmann::json& j);
nlohmann::json calibration_to_json(const Calibration& calib);
nlohmann::json fit_to_json(const FitResult& fit);

struct Simulation {
    std::vector<ScanRecord> records;  // detuning in DC grid units
    std::vector<double> dc_grid;
    std::vector<double> dc_level;
};

Simulation simulate(const RunConfig& config, const TwoModeGaussian& state);
Calibration calibrate(const RunConfig& config, const std::vector<double>& grid, const std::vector<double>& level);
FitResult fit_records(const RunConfig& config, const std::vector<ScanRecord>& records, const Calibration& calib);

struct FitFiles {
    std::filesystem::path scan;
    std::optional<std::filesystem::path> dc;
    std::optional<std::filesystem::path> calib;
};

struct RoundtripSummary {
    std::size_t total = 0;
    std::size_t within_3 = 0;
    double fraction() const { return total ? static_cast<double>(within_3) / static_cast<double>(total) : 0.0; }
};

struct PhiPoint {
    double phi = 0.0;
    Vec4 mean_sa = Vec4::Zero();
    Vec4 se_sa = Vec4::Zero();
    double radius = 0.0;
    double radius_se = 0.0;
};

// Commands. Each writes into config.out and returns what it wrote.
std::filesystem::path cmd_coeffs(const RunConfig& config);
std::vector<std::filesystem::path> cmd_simulate(const RunConfig& config);
FitResult cmd_fit(const RunConfig& config, const FitFiles& files);
RoundtripSummary cmd_roundtrip(const RunConfig& config);
IdentifiabilityReport cmd_rank(const RunConfig& config);
std::vector<PhiPoint> cmd_phi_sweep(const RunConfig& config);

}  // namespace rdtomo
