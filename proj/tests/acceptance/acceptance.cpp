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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rdtomo/app.hpp"
#include "rdtomo/estimator.hpp"
#include "rdtomo/measurement_model.hpp"
#include "rdtomo/scan_simulator.hpp"
#include "rdtomo/transfer.hpp"

namespace {

using namespace rdtomo;
using Clock = std::chrono::steady_clock;

constexpr double kPi = std::numbers::pi;
const ResonatorParams kReference{0.05, 2.9, 0.15};

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// 1. |r|^2 + T = 1.
Outcome energy_conservation() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    const std::vector<double> grid = linspace(-100.0, 100.0, 10000);
    for (double d : {0.0, 0.05, 0.5, 1.0}) {
        for (double delta : grid) {
            worst = std::max(worst, std::abs(std::norm(reflection(delta, d)) + transmission_T(delta, d) - 1.0));
        }
    }
    const double t = seconds_since(t0);
    return {worst < 1e-12 && t < 1.0, fmt("max error %.2e, %.3f s", worst, t)};
}

// 2. Vacuum input gives identity normalized covariance everywhere.
Outcome flat_shot_noise() {
    double worst = 0.0;
    double worst_raw = 0.0;
    std::size_t points = 0;
    for (double w : {2.9, 20.0}) {
        for (double d : {0.0, 0.05, 1.0}) {
            for (double f2 : {0.0, 0.15, 0.5}) {
                const ResonatorParams p{d, w, f2};
                for (double delta : linspace(-8.0 * w, 8.0 * w, 4001)) {
                    const PredictedMoments raw = predict_moments(TwoModeGaussian::vacuum(), delta, p, false);
                    worst_raw = std::max({worst_raw, std::abs(raw.cov2(0, 0) - 2.0 * raw.sql),
                                          std::abs(raw.cov2(1, 1) - 2.0 * raw.sql), std::abs(raw.cov2(0, 1))});
                    if (raw.sql > 0.0) {
                        const PredictedMoments pm = predict_moments(TwoModeGaussian::vacuum(), delta, p, true);
                        worst = std::max(worst, (pm.cov2 - Mat2::Identity()).cwiseAbs().maxCoeff());
                    }
                    ++points;
                }
            }
        }
    }
    return {worst < 1e-10 && worst_raw < 1e-10,
            fmt("max |cov2 - I| %.2e, raw closure %.2e over %zu points", worst, worst_raw, points)};
}

// 3. Narrowband limits at Omega = 1000, d = 0, f2 = 0.
Outcome region_limit(double sign) {
    const double w = 1e3;
    const ResonatorParams p{0.0, w, 0.0};
    const Vec4 expect = sign < 0 ? Vec4(0, 0, 1, 0) : Vec4(1, 0, 0, 0);
    const CoefficientSet cs = coefficients(sign * w, p);
    const double dev = std::max((cs.c_cos - expect).cwiseAbs().maxCoeff(), std::abs(cs.vac_cov(0, 0) - 1.0));
    const CoefficientSet far = coefficients(sign * 1e6, {0.0, 1e6, 0.0});
    const double dev_far =
        std::max((far.c_cos - expect).cwiseAbs().maxCoeff(), std::abs(far.vac_cov(0, 0) - 1.0));
    return {dev < 1e-5, fmt("max deviation %.2e at Omega/gamma = 1e3 (%.2e at 1e6)", dev, dev_far)};
}

Outcome region_center() {
    const ResonatorParams p{0.0, 1e3, 0.0};
    double worst = 0.0;
    for (double delta : linspace(-2.0, 2.0, 401)) {
        const CoefficientSet cs = coefficients(delta, p);
        Mat24 sa = coefficients_sa(cs);
        if (cs.sql > 0.0) {
            sa /= std::sqrt(2.0 * cs.sql);
        }
        worst = std::max({worst, std::abs(sa(0, 2)), std::abs(sa(0, 3)), std::abs(sa(1, 0)), std::abs(sa(1, 1))});
    }
    return {worst < 1e-2, fmt("max cross coefficient %.2e over |Delta| <= 2", worst)};
}

// 4. G+(-Delta) = conj(G-(Delta)).
Outcome mirror_symmetry() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const ResonatorParams p{u(rng), 0.1 + 20.0 * u(rng), 0.99 * u(rng)};
        for (double delta : linspace(-30.0, 30.0, 601)) {
            const Complex a = effective_coeff(-delta, Sideband::Upper, p);
            const Complex b = std::conj(effective_coeff(delta, Sideband::Lower, p));
            worst = std::max(worst, std::abs(a - b));
        }
    }
    return {worst < 1e-12, fmt("max |G+(-D) - conj G-(D)| %.2e over 100 random resonators", worst)};
}

// 5. Rank of the second-moment design.
Outcome rank_complete() {
    const auto t0 = Clock::now();
    const auto rep = identifiability_report(kReference, linspace(-8.0, 8.0, 401));
    const double t = seconds_since(t0);
    const double smin = rep.second_singular_values[rep.second_singular_values.size() - 1];
    return {rep.second_rank == 10 && t < 5.0,
            fmt("rank %d, smallest normalized singular value %.2e, %.3f s", rep.second_rank, smin, t)};
}

Outcome rank_lossless() {
    const auto rep = identifiability_report({1.0, 2.9, 0.0}, linspace(-8.0, 8.0, 401));
    const double smin = rep.second_singular_values[rep.second_singular_values.size() - 1];
    return {rep.second_rank < 10, fmt("rank %d, smallest normalized singular value %.2e", rep.second_rank, smin)};
}

// Full pipeline at the default scan size: simulate scan and DC curve, calibrate, fit.
struct Roundtrip {
    Eigen::Matrix<double, 14, 1> z;
    Vec4 mean_se;
    Vec4 var_se;
    double seconds;
};

Roundtrip full_roundtrip(std::uint64_t seed) {
    RunConfig c;
    c.seed = seed;
    const TwoModeGaussian truth = RunConfig::default_state();
    const auto t0 = Clock::now();
    const Simulation sim = simulate(c, truth);
    const Calibration calib = calibrate(c, sim.dc_grid, sim.dc_level);
    const FitResult fit = fit_records(c, sim.records, calib);
    Roundtrip r;
    r.seconds = seconds_since(t0);
    const Vec4 m = truth.in_basis(Basis::SymAntisym).mean();
    const Vec10 v = pack_cov(truth.cov());
    const Vec4 mse = fit.first.se(Basis::SymAntisym);
    const Vec10 vse = fit.second.se(Basis::Sideband);
    for (int k = 0; k < 4; ++k) {
        r.z[k] = (fit.first.mean_sa[k] - m[k]) / mse[k];
        r.mean_se[k] = mse[k];
        r.var_se[k] = vse[cov10_index(k, k)];
    }
    for (int j = 0; j < 10; ++j) {
        r.z[4 + j] = (fit.second.cov10_sb[j] - v[j]) / vse[j];
    }
    return r;
}

Outcome roundtrip_single() {
    const Roundtrip r = full_roundtrip(0);
    const double zmax = r.z.cwiseAbs().maxCoeff();
    return {zmax <= 3.0 && r.seconds < 60.0,
            fmt("max |z| %.2f over 4 means and 10 covariance elements, %.2f s per scan", zmax, r.seconds)};
}

Outcome roundtrip_mean_se() {
    const Roundtrip r = full_roundtrip(0);
    const bool ok = (r.mean_se.array() >= 0.25).all() && (r.mean_se.array() <= 1.4).all();
    return {ok, fmt("mean se (%.4f, %.4f, %.4f, %.4f); benchmark 0.5-0.7, band [0.25, 1.4]", r.mean_se[0], r.mean_se[1],
                    r.mean_se[2], r.mean_se[3])};
}

Outcome roundtrip_var_se() {
    const Roundtrip r = full_roundtrip(0);
    const bool ok = (r.var_se.array() >= 0.015).all() && (r.var_se.array() <= 0.06).all();
    return {ok, fmt("variance se (%.4f, %.4f, %.4f, %.4f); benchmark 0.03, band [0.015, 0.06]", r.var_se[0],
                    r.var_se[1], r.var_se[2], r.var_se[3])};
}

Outcome roundtrip_seeds() {
    std::size_t within = 0;
    std::size_t total = 0;
    double slowest = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Roundtrip r = full_roundtrip(seed);
        slowest = std::max(slowest, r.seconds);
        for (int k = 0; k < 14; ++k) {
            within += std::abs(r.z[k]) <= 3.0;
            ++total;
        }
    }
    const double frac = static_cast<double>(within) / static_cast<double>(total);
    return {frac >= 0.95 && slowest < 60.0,
            fmt("%zu/%zu z-scores within 3 (%.1f%%), slowest scan %.2f s", within, total, 100.0 * frac, slowest)};
}

// 7. Phase sweep around the circle.
std::vector<PhiPoint> phi_points() {
    RunConfig c;
    c.phi_sweep.count = 14;
    c.phi_sweep.s = 31.3;
    c.out = std::filesystem::temp_directory_path() / "rdtomo_acceptance_phi";
    const auto pts = cmd_phi_sweep(c);
    std::filesystem::remove_all(c.out);
    return pts;
}

Outcome phi_radius() {
    double worst = 0.0;
    for (const PhiPoint& p : phi_points()) {
        worst = std::max(worst, std::abs(p.radius - 31.3) / p.radius_se);
    }
    return {worst < 3.0, fmt("max radial deviation %.2f se over 14 phases", worst)};
}

Outcome phi_quiet_quadratures() {
    double worst = 0.0;
    for (const PhiPoint& p : phi_points()) {
        worst = std::max({worst, std::abs(p.mean_sa[0]) / p.se_sa[0], std::abs(p.mean_sa[3]) / p.se_sa[3]});
    }
    return {worst < 3.0, fmt("max |<p_s>|, |<q_a>| %.2f se over 14 phases", worst)};
}

// 8. Error halves as the sample count quadruples.
Outcome consistency() {
    const TwoModeGaussian truth = RunConfig::default_state();
    const Vec4 m = truth.in_basis(Basis::SymAntisym).mean();
    std::vector<double> rms;
    for (std::size_t n : {25000u, 100000u, 400000u}) {
        double ss = 0.0;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            RunConfig c;
            c.scan.n_samples = n;
            c.seed = 1000 + seed;
            const Simulation sim = simulate(c, truth);
            const Calibration calib = calibrate(c, sim.dc_grid, sim.dc_level);
            const FitResult fit = fit_records(c, sim.records, calib);
            ss += (fit.first.mean_sa - m).squaredNorm();
        }
        rms.push_back(std::sqrt(ss / (50.0 * 4.0)));
    }
    const double r1 = rms[0] / rms[1];
    const double r2 = rms[1] / rms[2];
    const bool ok = std::abs(r1 / 2.0 - 1.0) <= 0.25 && std::abs(r2 / 2.0 - 1.0) <= 0.25;
    return {ok, fmt("rms error %.4f, %.4f, %.4f at 25k, 100k, 400k samples; ratios %.2f, %.2f", rms[0], rms[1],
                    rms[2], r1, r2)};
}

// 9. DC calibration.
std::vector<double> dc_grid() { return linspace(100.0 - 400.0, 100.0 + 400.0, 2001); }

std::vector<double> dc_level(double noise_rel, std::uint64_t seed) {
    DcOptions o;
    o.gain = 3.0;
    o.delta_scale = 40.0;
    o.delta_offset = 100.0;
    o.noise_rel = noise_rel;
    o.seed = seed;
    return dc_profile(kReference, dc_grid(), o);
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

Outcome calibration_joint() {
    const Calibration c = calibrate_dc(dc_grid(), dc_level(0.0, 0));
    const double worst = std::max({rel(c.d, 0.05), rel(c.f2, 0.15), rel(c.delta_scale, 40.0), rel(c.delta_offset, 100.0)});
    return {worst < 1e-6, fmt("d %.6f, f2 %.6f, scale %.6f, offset %.6f with d and f2 both free; "
                              "(1-d)(1-f2) = %.9f (true %.9f); worst relative error %.2e",
                              c.d, c.f2, c.delta_scale, c.delta_offset, (1 - c.d) * (1 - c.f2), 0.95 * 0.85, worst)};
}

Outcome calibration_known_f2() {
    CalibrationOptions o;
    o.known_f2 = 0.15;
    const Calibration c = calibrate_dc(dc_grid(), dc_level(0.0, 0), o);
    const double worst = std::max({rel(c.d, 0.05), rel(c.delta_scale, 40.0), rel(c.delta_offset, 100.0)});
    return {worst < 1e-6, fmt("d %.9f, scale %.9f, offset %.9f with f2 known; worst relative error %.2e", c.d,
                              c.delta_scale, c.delta_offset, worst)};
}

Outcome calibration_noisy() {
    CalibrationOptions o;
    o.known_f2 = 0.15;
    double worst = 0.0;
    double ss = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Calibration c = calibrate_dc(dc_grid(), dc_level(0.01, seed), o);
        worst = std::max(worst, std::abs(c.d - 0.05));
        ss += (c.d - 0.05) * (c.d - 0.05);
    }
    return {worst <= 0.005, fmt("max |d - 0.05| %.5f, rms %.5f over 100 seeds (bound 0.005)", worst, std::sqrt(ss / 100))};
}

struct Criterion {
    std::string id;
    std::string name;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {"1", "energy conservation", energy_conservation},
        {"2", "flat shot noise", flat_shot_noise},
        {"3a", "upper sideband resonant limit", [] { return region_limit(-1.0); }},
        {"3b", "lower sideband resonant limit", [] { return region_limit(1.0); }},
        {"3c", "S/A structure near the carrier", region_center},
        {"4", "mirror symmetry", mirror_symmetry},
        {"5a", "completeness rank", rank_complete},
        {"5b", "lossless rank deficiency", rank_lossless},
        {"6a", "roundtrip within 3 se", roundtrip_single},
        {"6b", "roundtrip mean se vs benchmark", roundtrip_mean_se},
        {"6c", "roundtrip variance se vs benchmark", roundtrip_var_se},
        {"6d", "roundtrip z-scores over 20 seeds", roundtrip_seeds},
        {"7a", "phase sweep radius", phi_radius},
        {"7b", "phase sweep quiet quadratures", phi_quiet_quadratures},
        {"8", "estimator consistency", consistency},
        {"9a", "DC calibration, d and f2 free", calibration_joint},
        {"9b", "DC calibration, f2 known", calibration_known_f2},
        {"9c", "DC calibration with 1% noise", calibration_noisy},
    };
    return list;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    std::vector<std::string> only;
    bool list = false;
    app.add_option("--only", only, "Run the listed criteria (e.g. 6 or 6b)");
    app.add_flag("--list", list, "List criteria");
    CLI11_PARSE(app, argc, argv);

    int failures = 0;
    int ran = 0;
    for (const Criterion& c : criteria()) {
        const bool selected = only.empty() || std::any_of(only.begin(), only.end(), [&](const std::string& s) {
                                  return c.id == s || (c.id.size() > s.size() && c.id.rfind(s, 0) == 0 &&
                                                       std::isalpha(static_cast<unsigned char>(c.id[s.size()])));
                              });
        if (!selected) {
            continue;
        }
        if (list) {
            std::printf("%s %s\n", c.id.c_str(), c.name.c_str());
            continue;
        }
        ++ran;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %s %s: %s\n", o.pass ? "PASS" : "FAIL", c.id.c_str(), c.name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    if (!list && ran == 0) {
        std::fprintf(stderr, "no criterion matches\n");
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
