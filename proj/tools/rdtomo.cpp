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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rdtomo/app.hpp"
#include "rdtomo/errors.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> grid;
    std::optional<double> omega_ratio;
    std::optional<double> d;
    std::optional<double> f2;
    std::optional<std::string> basis;
    std::optional<bool> normalized;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
        cmd->add_option("--seed", seed, "Random seed");
        cmd->add_option("--out", out, "Output directory");
        cmd->add_option("--grid", grid, "Detuning grid start:end:count");
        cmd->add_option("--omega-ratio", omega_ratio, "Sideband frequency in half bandwidths");
        cmd->add_option("--d", d, "Resonator reflectance on resonance");
        cmd->add_option("--f2", f2, "Mode-mismatch power fraction");
        cmd->add_option("--basis", basis, "Report basis")->check(CLI::IsMember({"sideband", "sa"}));
        cmd->add_option("--normalized", normalized, "Normalize to the standard quantum level (true/false)");
    }

    rdtomo::RunConfig resolve() const {
        rdtomo::RunConfig c = config.empty() ? rdtomo::RunConfig{} : rdtomo::load_config(config);
        if (seed) c.seed = *seed;
        if (out) c.out = *out;
        if (grid) c.grid = rdtomo::parse_grid(*grid);
        if (omega_ratio) c.resonator.omega_ratio = *omega_ratio;
        if (d) c.resonator.d = *d;
        if (f2) c.resonator.f2 = *f2;
        if (basis) c.basis = rdtomo::parse_basis(*basis);
        if (normalized) c.normalized = *normalized;
        c.validate();
        return c;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-mode Gaussian tomography by resonator detection"};
    app.require_subcommand(1);

    CommonFlags coeffs_flags, simulate_flags, fit_flags, roundtrip_flags, rank_flags, phi_flags;

    auto* coeffs = app.add_subcommand("coeffs", "Write detection coefficients over the grid");
    coeffs_flags.attach(coeffs);

    auto* simulate = app.add_subcommand("simulate", "Simulate a detuning scan and its DC profile");
    simulate_flags.attach(simulate);

    auto* fit = app.add_subcommand("fit", "Calibrate and fit moments to a scan file");
    fit_flags.attach(fit);
    std::string scan_path;
    std::optional<std::string> dc_path;
    std::optional<std::string> calib_path;
    fit->add_option("--scan", scan_path, "Scan CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--dc", dc_path, "DC profile CSV")->check(CLI::ExistingFile);
    fit->add_option("--calib", calib_path, "Calibration JSON (skips the DC fit)")->check(CLI::ExistingFile);

    auto* roundtrip = app.add_subcommand("roundtrip", "Simulate, fit and compare to the truth");
    roundtrip_flags.attach(roundtrip);
    std::optional<std::size_t> seeds;
    roundtrip->add_option("--seeds", seeds, "Number of consecutive seeds");

    auto* rank = app.add_subcommand("rank", "Rank of the moment designs over the grid");
    rank_flags.attach(rank);

    auto* phi = app.add_subcommand("phi-sweep", "Mean fits for phase-modulated states around the circle");
    phi_flags.attach(phi);
    std::optional<std::size_t> count;
    std::optional<double> amplitude;
    phi->add_option("--count", count, "Number of phases");
    phi->add_option("--s", amplitude, "Displacement magnitude");

    CLI11_PARSE(app, argc, argv);

    try {
        if (coeffs->parsed()) {
            const auto path = rdtomo::cmd_coeffs(coeffs_flags.resolve());
            std::cout << "wrote " << path.string() << "\n";
        } else if (simulate->parsed()) {
            const rdtomo::RunConfig c = simulate_flags.resolve();
            for (const auto& path : rdtomo::cmd_simulate(c)) {
                std::cout << "wrote " << path.string() << "\n";
            }
        } else if (fit->parsed()) {
            rdtomo::FitFiles files{scan_path, std::nullopt, std::nullopt};
            if (dc_path) files.dc = *dc_path;
            if (calib_path) files.calib = *calib_path;
            const rdtomo::RunConfig c = fit_flags.resolve();
            const rdtomo::FitResult res = rdtomo::cmd_fit(c, files);
            for (const auto& w : res.warnings) {
                std::cerr << "warning: " << w << "\n";
            }
            const auto mean = res.first.mean(c.basis);
            const auto se = res.first.se(c.basis);
            std::cout << "means (" << rdtomo::basis_name(c.basis) << "):";
            for (int k = 0; k < 4; ++k) {
                std::cout << " " << mean[k] << "(" << se[k] << ")";
            }
            std::cout << "\nwrote " << (c.out / "fit.json").string() << "\n";
        } else if (roundtrip->parsed()) {
            rdtomo::RunConfig c = roundtrip_flags.resolve();
            if (seeds) c.roundtrip_seeds = *seeds;
            c.validate();
            const auto summary = rdtomo::cmd_roundtrip(c);
            std::cout << summary.within_3 << "/" << summary.total << " moments within 3 se ("
                      << 100.0 * summary.fraction() << "%)\n";
        } else if (rank->parsed()) {
            const auto rep = rdtomo::cmd_rank(rank_flags.resolve());
            std::cout << "second-moment rank " << rep.second_rank << ", first-moment rank " << rep.first_rank
                      << "\n";
        } else if (phi->parsed()) {
            rdtomo::RunConfig c = phi_flags.resolve();
            if (count) c.phi_sweep.count = *count;
            if (amplitude) c.phi_sweep.s = *amplitude;
            c.validate();
            for (const auto& p : rdtomo::cmd_phi_sweep(c)) {
                std::cout << p.phi << " radius " << p.radius << "(" << p.radius_se << ")\n";
            }
        }
    } catch (const rdtomo::CalibrationError& e) {
        std::cerr << "calibration failed: " << e.what() << "\n";
        return 2;
    } catch (const rdtomo::ModelMismatch& e) {
        std::cerr << "model mismatch: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
