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

#include "rdtomo/app.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "rdtomo/errors.hpp"
#include "rdtomo/io.hpp"
#include "rdtomo/measurement_model.hpp"

namespace rdtomo {

using nlohmann::json;

namespace {

const char* const kSidebandNames[4] = {"p+", "q+", "p-", "q-"};
const char* const kSaNames[4] = {"ps", "qs", "pa", "qa"};
constexpr int kJsonVersion = 1;
constexpr int kTomographyAngles = 8;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) {
        throw std::invalid_argument(where + " must be a JSON object");
    }
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw std::invalid_argument("unknown key '" + item.key() + "' in " + where);
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, T& target) {
    if (obj.contains(key)) {
        target = obj.at(key).get<T>();
    }
}

void read_size(const json& obj, const char* key, std::size_t& target) {
    if (obj.contains(key)) {
        const json& v = obj.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw std::invalid_argument(std::string(key) + " must be a non-negative integer");
        }
        target = v.get<std::size_t>();
    }
}

Weighting parse_weighting(const std::string& name) {
    if (name == "model") {
        return Weighting::Model;
    }
    if (name == "empirical") {
        return Weighting::Empirical;
    }
    if (name == "uniform") {
        return Weighting::Uniform;
    }
    throw std::invalid_argument("unknown weighting '" + name + "' (expected model, empirical or uniform)");
}

std::string weighting_name(Weighting w) {
    switch (w) {
        case Weighting::Model: return "model";
        case Weighting::Empirical: return "empirical";
        case Weighting::Uniform: return "uniform";
    }
    return "model";
}

std::string grid_text(const GridSpec& g) {
    return format_double(g.start) + ":" + format_double(g.end) + ":" + std::to_string(g.count);
}

json vec_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        arr.push_back(v[i]);
    }
    return arr;
}

std::vector<std::string> cov_names(Basis b) {
    const char* const* names = b == Basis::Sideband ? kSidebandNames : kSaNames;
    std::vector<std::string> out;
    for (int k = 0; k < 4; ++k) {
        for (int l = k; l < 4; ++l) {
            out.push_back(std::string(names[k]) + "." + names[l]);
        }
    }
    return out;
}

std::vector<double> to_grid_units(const std::vector<double>& delta, const DcOptions& dc) {
    std::vector<double> out;
    out.reserve(delta.size());
    for (double x : delta) {
        out.push_back(x * dc.delta_scale + dc.delta_offset);
    }
    return out;
}

FitOptions fit_options(const RunConfig& config) {
    FitOptions o;
    o.weighting = config.fit.weighting;
    o.psd_projection = config.fit.psd_projection;
    o.subtract_vacuum = config.fit.subtract_vacuum;
    o.electronic_noise = config.fit.electronic_noise;
    return o;
}

void write_json(const std::filesystem::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

}  // namespace

GridSpec parse_grid(const std::string& text) {
    const std::size_t a = text.find(':');
    const std::size_t b = a == std::string::npos ? std::string::npos : text.find(':', a + 1);
    if (b == std::string::npos || text.find(':', b + 1) != std::string::npos) {
        throw std::invalid_argument("grid '" + text + "' must have the form start:end:count");
    }
    GridSpec g;
    const auto number = [&](std::size_t from, std::size_t to, double& out) {
        const char* first = text.data() + from;
        const char* last = text.data() + to;
        const auto res = std::from_chars(first, last, out);
        if (first == last || res.ec != std::errc() || res.ptr != last || !std::isfinite(out)) {
            throw std::invalid_argument("grid '" + text + "' has a malformed bound");
        }
    };
    number(0, a, g.start);
    number(a + 1, b, g.end);
    const char* first = text.data() + b + 1;
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, g.count);
    if (first == last || res.ec != std::errc() || res.ptr != last) {
        throw std::invalid_argument("grid '" + text + "' has a malformed count");
    }
    if (g.count < 2) {
        throw std::invalid_argument("grid count must be at least 2");
    }
    if (g.start == g.end) {
        throw std::invalid_argument("grid bounds must differ");
    }
    return g;
}

TwoModeGaussian RunConfig::default_state() {
    Mat4 cov = Mat4::Zero();
    cov.diagonal() << 1.25, 1.28, 1.28, 1.25;
    const Vec4 mean_sa(-0.6, 2.2, 11.8, 0.2);
    return TwoModeGaussian(basis_matrix() * mean_sa, cov, Basis::Sideband);
}

void RunConfig::validate() const {
    resonator.validate();
    scan.validate();
    if (const auto* pm = std::get_if<PhaseModSpec>(&state)) {
        pm->validate();
    }
    if (grid.count < 2) {
        throw std::invalid_argument("grid count must be at least 2");
    }
    if (dc.points < 8) {
        throw std::invalid_argument("dc.points must be at least 8");
    }
    if (!(dc.options.delta_scale > 0.0)) {
        throw std::invalid_argument("dc.delta_scale must be positive");
    }
    if (roundtrip_seeds == 0 || phi_sweep.count == 0) {
        throw std::invalid_argument("roundtrip.seeds and phi_sweep.count must be positive");
    }
}

TwoModeGaussian RunConfig::truth() const {
    if (const auto* pm = std::get_if<PhaseModSpec>(&state)) {
        return phase_modulated_state(*pm);
    }
    return std::get<TwoModeGaussian>(state);
}

TwoModeGaussian parse_state_json(const json& j) {
    if (j.is_string() && j.get<std::string>() == "vacuum") {
        return TwoModeGaussian::vacuum();
    }
    check_keys(j, {"mean", "cov", "basis"}, "state");
    const Basis basis = parse_basis(j.value("basis", std::string("sideband")));
    Vec4 mean = Vec4::Zero();
    Mat4 cov = Mat4::Identity();
    if (j.contains("mean")) {
        const auto m = j.at("mean").get<std::vector<double>>();
        if (m.size() != 4) {
            throw std::invalid_argument("state.mean must have 4 entries");
        }
        mean = Vec4(m[0], m[1], m[2], m[3]);
    }
    if (j.contains("cov")) {
        const auto c = j.at("cov").get<std::vector<std::vector<double>>>();
        if (c.size() != 4) {
            throw std::invalid_argument("state.cov must be 4x4");
        }
        for (int r = 0; r < 4; ++r) {
            if (c[static_cast<std::size_t>(r)].size() != 4) {
                throw std::invalid_argument("state.cov must be 4x4");
            }
            for (int k = 0; k < 4; ++k) {
                cov(r, k) = c[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
            }
        }
    }
    return TwoModeGaussian(mean, cov, basis);
}

json state_to_json(const TwoModeGaussian& state) {
    json cov = json::array();
    for (int r = 0; r < 4; ++r) {
        cov.push_back(vec_json(state.cov().row(r).transpose()));
    }
    return {{"basis", std::string(basis_name(state.basis()))}, {"mean", vec_json(state.mean())}, {"cov", cov}};
}

RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
    check_keys(j, {"resonator", "scan", "state", "grid", "dc", "fit", "phi_sweep", "roundtrip", "basis", "normalized",
                   "seed", "out"},
               "config");
    RunConfig c;
    if (j.contains("resonator")) {
        const json& r = j.at("resonator");
        check_keys(r, {"d", "omega_ratio", "f2"}, "resonator");
        read(r, "d", c.resonator.d);
        read(r, "omega_ratio", c.resonator.omega_ratio);
        read(r, "f2", c.resonator.f2);
    }
    if (j.contains("scan")) {
        const json& s = j.at("scan");
        check_keys(s, {"delta_start", "delta_end", "n_samples", "bin_mean", "bin_cov", "electronic_noise"}, "scan");
        read(s, "delta_start", c.scan.delta_start);
        read(s, "delta_end", c.scan.delta_end);
        read_size(s, "n_samples", c.scan.n_samples);
        read_size(s, "bin_mean", c.scan.bin_mean);
        read_size(s, "bin_cov", c.scan.bin_cov);
        read(s, "electronic_noise", c.scan.electronic_noise);
    }
    if (j.contains("state")) {
        const json& s = j.at("state");
        if (s.is_object() && s.contains("phase_mod")) {
            check_keys(s, {"phase_mod"}, "state");
            const json& p = s.at("phase_mod");
            check_keys(p, {"s", "phi", "excess_p", "excess_q"}, "state.phase_mod");
            PhaseModSpec spec;
            read(p, "s", spec.s);
            read(p, "phi", spec.phi);
            read(p, "excess_p", spec.excess_p);
            read(p, "excess_q", spec.excess_q);
            c.state = spec;
        } else if (s.is_object() && s.contains("file")) {
            check_keys(s, {"file"}, "state");
            std::filesystem::path file = s.at("file").get<std::string>();
            if (file.is_relative()) {
                file = base_dir / file;
            }
            if (!std::filesystem::exists(file)) {
                throw std::invalid_argument("state file " + file.string() + " does not exist");
            }
            c.state = parse_state_json(json::parse(read_file(file)));
        } else {
            c.state = parse_state_json(s);
        }
    }
    if (j.contains("grid")) {
        c.grid = parse_grid(j.at("grid").get<std::string>());
    }
    if (j.contains("dc")) {
        const json& d = j.at("dc");
        check_keys(d, {"points", "gain", "offset", "delta_scale", "delta_offset", "noise_rel", "noise_abs"}, "dc");
        read_size(d, "points", c.dc.points);
        read(d, "gain", c.dc.options.gain);
        read(d, "offset", c.dc.options.offset);
        read(d, "delta_scale", c.dc.options.delta_scale);
        read(d, "delta_offset", c.dc.options.delta_offset);
        read(d, "noise_rel", c.dc.options.noise_rel);
        read(d, "noise_abs", c.dc.options.noise_abs);
    }
    if (j.contains("fit")) {
        const json& f = j.at("fit");
        check_keys(f, {"weighting", "psd_projection", "subtract_vacuum", "electronic_noise", "free_f2"}, "fit");
        if (f.contains("weighting")) {
            c.fit.weighting = parse_weighting(f.at("weighting").get<std::string>());
        }
        read(f, "psd_projection", c.fit.psd_projection);
        read(f, "subtract_vacuum", c.fit.subtract_vacuum);
        read(f, "electronic_noise", c.fit.electronic_noise);
        read(f, "free_f2", c.fit.free_f2);
    }
    if (j.contains("phi_sweep")) {
        const json& p = j.at("phi_sweep");
        check_keys(p, {"count", "s", "excess_p", "excess_q"}, "phi_sweep");
        read_size(p, "count", c.phi_sweep.count);
        read(p, "s", c.phi_sweep.s);
        read(p, "excess_p", c.phi_sweep.excess_p);
        read(p, "excess_q", c.phi_sweep.excess_q);
    }
    if (j.contains("roundtrip")) {
        const json& r = j.at("roundtrip");
        check_keys(r, {"seeds"}, "roundtrip");
        read_size(r, "seeds", c.roundtrip_seeds);
    }
    if (j.contains("basis")) {
        c.basis = parse_basis(j.at("basis").get<std::string>());
    }
    read(j, "normalized", c.normalized);
    read(j, "seed", c.seed);
    if (j.contains("out")) {
        c.out = j.at("out").get<std::string>();
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw std::invalid_argument("config file " + path.string() + " does not exist");
    }
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config " + path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path());
}

json config_to_json(const RunConfig& c) {
    json state;
    if (const auto* pm = std::get_if<PhaseModSpec>(&c.state)) {
        state = {{"phase_mod", {{"s", pm->s}, {"phi", pm->phi}, {"excess_p", pm->excess_p}, {"excess_q", pm->excess_q}}}};
    } else {
        state = state_to_json(std::get<TwoModeGaussian>(c.state));
    }
    return {
        {"resonator", {{"d", c.resonator.d}, {"omega_ratio", c.resonator.omega_ratio}, {"f2", c.resonator.f2}}},
        {"scan",
         {{"delta_start", c.scan.delta_start},
          {"delta_end", c.scan.delta_end},
          {"n_samples", c.scan.n_samples},
          {"bin_mean", c.scan.bin_mean},
          {"bin_cov", c.scan.bin_cov},
          {"electronic_noise", c.scan.electronic_noise}}},
        {"state", state},
        {"grid", grid_text(c.grid)},
        {"dc",
         {{"points", c.dc.points},
          {"gain", c.dc.options.gain},
          {"offset", c.dc.options.offset},
          {"delta_scale", c.dc.options.delta_scale},
          {"delta_offset", c.dc.options.delta_offset},
          {"noise_rel", c.dc.options.noise_rel},
          {"noise_abs", c.dc.options.noise_abs}}},
        {"fit",
         {{"weighting", weighting_name(c.fit.weighting)},
          {"psd_projection", c.fit.psd_projection},
          {"subtract_vacuum", c.fit.subtract_vacuum},
          {"electronic_noise", c.fit.electronic_noise},
          {"free_f2", c.fit.free_f2}}},
        {"phi_sweep",
         {{"count", c.phi_sweep.count},
          {"s", c.phi_sweep.s},
          {"excess_p", c.phi_sweep.excess_p},
          {"excess_q", c.phi_sweep.excess_q}}},
        {"roundtrip", {{"seeds", c.roundtrip_seeds}}},
        {"basis", std::string(basis_name(c.basis))},
        {"normalized", c.normalized},
        {"seed", c.seed},
        {"out", c.out.string()},
    };
}

Calibration parse_calibration_json(const json& j) {
    const json& c = j.contains("calibration") ? j.at("calibration") : j;
    Calibration calib;
    calib.d = c.at("d").get<double>();
    calib.f2 = c.at("f2").get<double>();
    calib.delta_scale = c.value("delta_scale", 1.0);
    calib.delta_offset = c.value("delta_offset", 0.0);
    calib.gain = c.value("gain", 1.0);
    calib.offset = c.value("offset", 0.0);
    calib.residual_rms = c.value("residual_rms", 0.0);
    calib.validate();
    return calib;
}

json calibration_to_json(const Calibration& calib) {
    return {{"d", calib.d},
            {"f2", calib.f2},
            {"delta_scale", calib.delta_scale},
            {"delta_offset", calib.delta_offset},
            {"gain", calib.gain},
            {"offset", calib.offset},
            {"residual_rms", calib.residual_rms},
            {"iterations", calib.iterations},
            {"converged", calib.converged}};
}

json fit_to_json(const FitResult& fit) {
    json means = json::object();
    json covs = json::object();
    for (Basis b : {Basis::Sideband, Basis::SymAntisym}) {
        const char* const* names = b == Basis::Sideband ? kSidebandNames : kSaNames;
        means[std::string(basis_name(b))] = {
            {"names", std::vector<std::string>(names, names + 4)},
            {"value", vec_json(fit.first.mean(b))},
            {"se", vec_json(fit.first.se(b))},
        };
        covs[std::string(basis_name(b))] = {
            {"names", cov_names(b)},
            {"value", vec_json(fit.second.cov10(b))},
            {"se", vec_json(fit.second.se(b))},
        };
    }
    const double n1 = static_cast<double>(fit.first.dof) / 2.0;
    return {
        {"format", "rdtomo-fit"},
        {"version", kJsonVersion},
        {"calibration", calibration_to_json(fit.calibration)},
        {"omega_ratio", fit.omega_ratio},
        {"means", means},
        {"covariance", covs},
        {"imbalance", {{"value", fit.second.imbalance}, {"se", fit.second.imbalance_se}}},
        {"chi2_per_dof",
         {{"mean_cos", n1 > 0 ? fit.first.chi2_cos / n1 : 0.0},
          {"mean_sin", n1 > 0 ? fit.first.chi2_sin / n1 : 0.0},
          {"var_c", fit.second.chi2_per_dof[0]},
          {"var_s", fit.second.chi2_per_dof[1]},
          {"cov_cs", fit.second.chi2_per_dof[2]}}},
        {"diagnostics",
         {{"first",
           {{"condition", fit.first.condition},
            {"sigma_min", fit.first.sigma_min},
            {"rank", fit.first.rank},
            {"rank_deficient", fit.first.rank_deficient}}},
          {"second",
           {{"condition", fit.second.condition},
            {"sigma_min", fit.second.sigma_min},
            {"rank", fit.second.rank},
            {"rank_deficient", fit.second.rank_deficient}}},
          {"admissible", fit.second.admissible},
          {"min_symplectic_eigenvalue", fit.second.min_symplectic_eigenvalue},
          {"psd_projected", fit.second.psd_projected},
          {"psd_projection_flag", fit.second.psd_projection_flag},
          {"projected_sideband", vec_json(pack_cov(fit.second.projected_sb))}}},
        {"warnings", fit.warnings},
    };
}

Simulation simulate(const RunConfig& config, const TwoModeGaussian& state) {
    config.validate();
    ScanConfig scan = config.scan;
    scan.seed = config.seed;
    Simulation sim;
    sim.records = simulate_scan(state, config.resonator, scan);
    const DcOptions& dc = config.dc.options;
    for (ScanRecord& r : sim.records) {
        r.delta = r.delta * dc.delta_scale + dc.delta_offset;
    }
    sim.dc_grid = to_grid_units(linspace(scan.delta_start, scan.delta_end, config.dc.points), dc);
    DcOptions noisy = dc;
    noisy.seed = config.seed;
    sim.dc_level = dc_profile(config.resonator, sim.dc_grid, noisy);
    return sim;
}

Calibration calibrate(const RunConfig& config, const std::vector<double>& grid, const std::vector<double>& level) {
    CalibrationOptions opts;
    if (!config.fit.free_f2) {
        opts.known_f2 = config.resonator.f2;
    }
    opts.known_offset = config.dc.options.offset;
    return calibrate_dc(grid, level, opts);
}

FitResult fit_records(const RunConfig& config, const std::vector<ScanRecord>& records, const Calibration& calib) {
    const MomentCurves curves = bin_moments(records, config.scan);
    if (curves.cov_delta.empty()) {
        throw std::invalid_argument("scan holds fewer samples than one second-moment bin");
    }
    FitResult fit = fit_moments(curves, calib, config.resonator.omega_ratio, fit_options(config));
    if (curves.dropped_samples > 0) {
        fit.warnings.push_back(std::to_string(curves.dropped_samples) +
                               " trailing samples do not fill a second-moment bin and were dropped");
    }
    return fit;
}

std::filesystem::path cmd_coeffs(const RunConfig& config) {
    config.resonator.validate();
    std::vector<std::string> columns = {"delta", "re_r", "im_r", "T", "psi", "psi_singular",
                                        "x_p", "y_p", "x_m", "y_m", "sql"};
    for (const char* row : {"cos", "sin"}) {
        for (const char* n : kSidebandNames) {
            columns.push_back(std::string("sb_") + row + "_" + n);
        }
    }
    for (const char* row : {"cos", "sin"}) {
        for (const char* n : kSaNames) {
            columns.push_back(std::string("sa_") + row + "_" + n);
        }
    }
    columns.insert(columns.end(), {"vac_cc", "vac_ss", "vac_cs"});
    const std::string comment[] = {std::string("normalized: ") + (config.normalized ? "true" : "false")};
    CsvBuilder csv("coeffs", columns, comment);
    CsvBuilder tomo("tomography", {"delta", "theta", "mean", "variance"}, comment);
    const TwoModeGaussian state = config.truth();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double delta : config.grid.points()) {
        const CoefficientSet cs = coefficients(delta, config.resonator);
        const Complex r = reflection(delta, config.resonator.d);
        const PhaseSample psi = phase_psi(delta, config.resonator.d);
        const Complex gp = effective_coeff(delta, Sideband::Upper, config.resonator);
        const Complex gm = effective_coeff(delta, Sideband::Lower, config.resonator);
        Mat24 sb = cs.matrix();
        Mat24 sa = coefficients_sa(cs);
        Mat2 vac = cs.vac_cov;
        const bool defined = cs.sql > 0.0;
        if (config.normalized) {
            const double scale = 2.0 * cs.sql;
            if (defined) {
                sb /= std::sqrt(scale);
                sa /= std::sqrt(scale);
                vac /= scale;
            } else {
                sb.setConstant(nan);
                sa.setConstant(nan);
                vac.setConstant(nan);
            }
        }
        std::vector<double> row = {delta, r.real(), r.imag(), transmission_T(delta, config.resonator.d), psi.value,
                                   psi.singular ? 1.0 : 0.0, gp.real(), gp.imag(), gm.real(), gm.imag(), cs.sql};
        for (int rr = 0; rr < 2; ++rr) {
            for (int k = 0; k < 4; ++k) {
                row.push_back(sb(rr, k));
            }
        }
        for (int rr = 0; rr < 2; ++rr) {
            for (int k = 0; k < 4; ++k) {
                row.push_back(sa(rr, k));
            }
        }
        row.insert(row.end(), {vac(0, 0), vac(1, 1), vac(0, 1)});
        csv.row(row);

        const bool usable = defined || !config.normalized;
        const PredictedMoments pm = usable ? predict_moments(state, cs, config.normalized) : PredictedMoments{};
        for (int k = 0; k < kTomographyAngles; ++k) {
            const double theta = std::numbers::pi * k / kTomographyAngles;
            const Projection proj = theta_projection(pm, theta);
            tomo.row({delta, theta, usable ? proj.mean : nan, usable ? proj.variance : nan});
        }
    }
    const std::filesystem::path path = config.out / "coeffs.csv";
    write_file_atomic(path, csv.str());
    write_file_atomic(config.out / "tomography.csv", tomo.str());
    return path;
}

std::vector<std::filesystem::path> cmd_simulate(const RunConfig& config) {
    const TwoModeGaussian state = config.truth();
    const Simulation sim = simulate(config, state);
    const std::filesystem::path scan_path = config.out / "scan.csv";
    const std::filesystem::path moments_path = config.out / "moments.csv";
    const std::filesystem::path predicted_path = config.out / "predicted.csv";
    const std::filesystem::path dc_path = config.out / "dc.csv";
    const std::filesystem::path config_path = config.out / "config.json";

    write_file_atomic(scan_path, scan_csv(sim.records));

    const MomentCurves curves = bin_moments(sim.records, config.scan);
    const std::size_t per_bin = config.scan.bin_cov / config.scan.bin_mean;
    CsvBuilder moments("moments",
                       {"delta", "mean_c", "mean_s", "var_c", "var_s", "cov_cs", "sql", "n", "dof"});
    CsvBuilder predicted("predicted", {"delta", "mean_c", "mean_s", "var_c", "var_s", "cov_cs", "sql"});
    for (std::size_t i = 0; i < curves.cov_delta.size(); ++i) {
        double mc = 0.0;
        double ms = 0.0;
        for (std::size_t k = 0; k < per_bin; ++k) {
            mc += curves.mean_c[i * per_bin + k];
            ms += curves.mean_s[i * per_bin + k];
        }
        const double delta = (curves.cov_delta[i] - config.dc.options.delta_offset) / config.dc.options.delta_scale;
        const PredictedMoments pm = predict_moments(state, delta, config.resonator, true);
        moments.row({delta, mc / static_cast<double>(per_bin), ms / static_cast<double>(per_bin),
                     curves.var_c[i], curves.var_s[i], curves.cov_cs[i], pm.sql, static_cast<double>(curves.cov_n[i]),
                     static_cast<double>(curves.cov_dof[i])});
        predicted.row({delta, pm.mean2[0], pm.mean2[1], pm.cov2(0, 0), pm.cov2(1, 1), pm.cov2(0, 1), pm.sql});
    }
    write_file_atomic(moments_path, moments.str());
    write_file_atomic(predicted_path, predicted.str());
    write_file_atomic(dc_path, dc_csv(sim.dc_grid, sim.dc_level));
    write_json(config_path, config_to_json(config));
    return {scan_path, moments_path, predicted_path, dc_path, config_path};
}

FitResult cmd_fit(const RunConfig& config, const FitFiles& files) {
    const std::vector<ScanRecord> records = parse_scan_csv(read_file(files.scan));
    Calibration calib;
    if (files.calib) {
        calib = parse_calibration_json(json::parse(read_file(*files.calib)));
    } else if (files.dc) {
        const auto [grid, level] = parse_dc_csv(read_file(*files.dc));
        calib = calibrate(config, grid, level);
    } else {
        throw std::invalid_argument("fit needs a DC profile (--dc) or a calibration (--calib)");
    }
    const FitResult fit = fit_records(config, records, calib);
    write_json(config.out / "fit.json", fit_to_json(fit));
    return fit;
}

RoundtripSummary cmd_roundtrip(const RunConfig& config) {
    const TwoModeGaussian truth = config.truth();
    const Vec4 true_mean = truth.in_basis(config.basis).mean();
    const Vec10 true_cov = pack_cov(truth.in_basis(config.basis).cov());
    CsvBuilder csv("roundtrip", {"seed", "moment", "truth", "estimate", "se", "z"});
    RoundtripSummary summary;
    json per_seed = json::array();
    for (std::size_t i = 0; i < config.roundtrip_seeds; ++i) {
        RunConfig run = config;
        run.seed = config.seed + i;
        const Simulation sim = simulate(run, truth);
        const Calibration calib = calibrate(run, sim.dc_grid, sim.dc_level);
        const FitResult fit = fit_records(run, sim.records, calib);
        Eigen::Matrix<double, 14, 1> t;
        Eigen::Matrix<double, 14, 1> e;
        Eigen::Matrix<double, 14, 1> se;
        t << true_mean, true_cov;
        e << fit.first.mean(config.basis), fit.second.cov10(config.basis);
        se << fit.first.se(config.basis), fit.second.se(config.basis);
        json zs = json::array();
        for (int k = 0; k < 14; ++k) {
            const double z = (e[k] - t[k]) / se[k];
            csv.row({static_cast<double>(run.seed), static_cast<double>(k), t[k], e[k], se[k], z});
            zs.push_back(z);
            ++summary.total;
            if (std::abs(z) <= 3.0) {
                ++summary.within_3;
            }
        }
        per_seed.push_back({{"seed", run.seed}, {"calibration", calibration_to_json(calib)}, {"z", zs}});
    }
    std::vector<std::string> names;
    const char* const* mnames = config.basis == Basis::Sideband ? kSidebandNames : kSaNames;
    names.assign(mnames, mnames + 4);
    for (const std::string& n : cov_names(config.basis)) {
        names.push_back(n);
    }
    write_file_atomic(config.out / "roundtrip.csv", csv.str());
    write_json(config.out / "roundtrip.json", {{"format", "rdtomo-roundtrip"},
                                               {"version", kJsonVersion},
                                               {"basis", std::string(basis_name(config.basis))},
                                               {"moments", names},
                                               {"total", summary.total},
                                               {"within_3_se", summary.within_3},
                                               {"fraction_within_3_se", summary.fraction()},
                                               {"seeds", per_seed}});
    return summary;
}

IdentifiabilityReport cmd_rank(const RunConfig& config) {
    const IdentifiabilityReport rep = identifiability_report(config.resonator, config.grid.points());
    write_json(config.out / "rank.json", {{"format", "rdtomo-rank"},
                                          {"version", kJsonVersion},
                                          {"resonator",
                                           {{"d", config.resonator.d},
                                            {"omega_ratio", config.resonator.omega_ratio},
                                            {"f2", config.resonator.f2}}},
                                          {"grid", grid_text(config.grid)},
                                          {"threshold", kRankThreshold},
                                          {"second_moment_rank", rep.second_rank},
                                          {"second_moment_singular_values", vec_json(rep.second_singular_values)},
                                          {"first_moment_rank", rep.first_rank},
                                          {"first_moment_singular_values", vec_json(rep.first_singular_values)},
                                          {"points_used", rep.points_used},
                                          {"points_skipped", rep.points_skipped}});
    return rep;
}

std::vector<PhiPoint> cmd_phi_sweep(const RunConfig& config) {
    config.validate();
    std::vector<PhiPoint> points;
    CsvBuilder csv("phi-sweep", {"phi", "p_s", "q_s", "p_a", "q_a", "se_p_s", "se_q_s", "se_p_a", "se_q_a", "radius",
                                 "radius_se"});
    for (std::size_t k = 0; k < config.phi_sweep.count; ++k) {
        PhaseModSpec spec;
        spec.s = config.phi_sweep.s;
        spec.phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(config.phi_sweep.count);
        spec.excess_p = config.phi_sweep.excess_p;
        spec.excess_q = config.phi_sweep.excess_q;
        RunConfig run = config;
        run.seed = config.seed + k;
        const Simulation sim = simulate(run, phase_modulated_state(spec));
        const Calibration calib = calibrate(run, sim.dc_grid, sim.dc_level);
        const MomentCurves curves = bin_moments(sim.records, run.scan);
        const FirstMomentFit fit = fit_first_moments(curves, calib, run.resonator.omega_ratio, fit_options(run));
        PhiPoint p;
        p.phi = spec.phi;
        p.mean_sa = fit.mean_sa;
        p.se_sa = fit.se(Basis::SymAntisym);
        const double qs = p.mean_sa[1];
        const double pa = p.mean_sa[2];
        p.radius = std::hypot(qs, pa);
        const double var = qs * qs * fit.cov_sa(1, 1) + pa * pa * fit.cov_sa(2, 2) + 2.0 * qs * pa * fit.cov_sa(1, 2);
        p.radius_se = p.radius > 0.0 ? std::sqrt(std::max(0.0, var)) / p.radius : 0.0;
        csv.row({p.phi, p.mean_sa[0], p.mean_sa[1], p.mean_sa[2], p.mean_sa[3], p.se_sa[0], p.se_sa[1], p.se_sa[2],
                 p.se_sa[3], p.radius, p.radius_se});
        points.push_back(p);
    }
    write_file_atomic(config.out / "phi_sweep.csv", csv.str());
    return points;
}

}  // namespace rdtomo
