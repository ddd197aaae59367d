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

#include "rdtomo/scan_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rdtomo/measurement_model.hpp"
#include "rdtomo/philox.hpp"

namespace rdtomo {

namespace {

// Symmetric square root of a 2x2 covariance, negative eigenvalues clamped to 0.
Mat2 psd_sqrt(const Mat2& cov) {
    Eigen::SelfAdjointEigenSolver<Mat2> eig;
    eig.computeDirect(cov);
    const Vec2 root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

void ScanConfig::validate() const {
    if (!std::isfinite(delta_start) || !std::isfinite(delta_end) || delta_start == delta_end) {
        throw std::invalid_argument("scan endpoints must be finite and distinct");
    }
    if (bin_mean == 0 || bin_cov == 0 || n_samples == 0) {
        throw std::invalid_argument("sample and bin counts must be positive");
    }
    if (bin_cov % bin_mean != 0) {
        throw std::invalid_argument("bin_cov (" + std::to_string(bin_cov) + ") must be a multiple of bin_mean (" +
                                    std::to_string(bin_mean) + ")");
    }
    if (n_samples % bin_cov != 0) {
        throw std::invalid_argument("n_samples (" + std::to_string(n_samples) + ") must be a multiple of bin_cov (" +
                                    std::to_string(bin_cov) + ")");
    }
    if (n_samples < 2) {
        throw std::invalid_argument("a scan needs at least two samples");
    }
    if (!(electronic_noise >= 0.0)) {
        throw std::invalid_argument("electronic_noise must be non-negative");
    }
}

double ScanConfig::delta_at(std::size_t index) const {
    const double t = static_cast<double>(index) / static_cast<double>(n_samples - 1);
    return delta_start + (delta_end - delta_start) * t;
}

std::vector<ScanRecord> simulate_bins(const TwoModeGaussian& state, const ResonatorParams& params,
                                      const ScanConfig& config, std::size_t first_bin, std::size_t bin_count) {
    config.validate();
    params.validate();
    if (first_bin + bin_count > config.n_cov_bins()) {
        throw std::out_of_range("requested bins exceed the scan");
    }
    const TwoModeGaussian sb = state.in_basis(Basis::Sideband);
    const Mat2 electronic = config.electronic_noise * Mat2::Identity();

    std::vector<ScanRecord> out;
    out.reserve(bin_count * config.bin_cov);
    for (std::size_t bin = first_bin; bin < first_bin + bin_count; ++bin) {
        const GaussianStream rng(config.seed, kScanStream, static_cast<std::uint32_t>(bin));
        for (std::size_t k = 0; k < config.bin_cov; ++k) {
            const std::size_t index = bin * config.bin_cov + k;
            const double delta = config.delta_at(index);
            const PredictedMoments pm = predict_moments(sb, delta, params, true);
            const auto [z0, z1] = rng.normal_pair(static_cast<std::uint32_t>(k));
            const Vec2 j = pm.mean2 + psd_sqrt(pm.cov2 + electronic) * Vec2(z0, z1);
            out.push_back({index, delta, j[0], j[1]});
        }
    }
    return out;
}

std::vector<ScanRecord> simulate_scan(const TwoModeGaussian& state, const ResonatorParams& params,
                                      const ScanConfig& config) {
    config.validate();
    return simulate_bins(state, params, config, 0, config.n_cov_bins());
}

MomentCurves bin_moments(std::span<const ScanRecord> records, const ScanConfig& config) {
    if (config.bin_mean == 0 || config.bin_cov == 0 || config.bin_cov % config.bin_mean != 0) {
        throw std::invalid_argument("bin_cov must be a positive multiple of bin_mean");
    }
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].index <= records[i - 1].index) {
            throw std::invalid_argument("scan records must be sorted by strictly increasing index");
        }
    }
    const std::size_t m = config.bin_mean;
    const std::size_t blocks_per_bin = config.bin_cov / m;
    const std::size_t n_bins = records.size() / config.bin_cov;

    MomentCurves out;
    out.dropped_samples = records.size() - n_bins * config.bin_cov;
    for (std::size_t bin = 0; bin < n_bins; ++bin) {
        double ss_c = 0.0;
        double ss_s = 0.0;
        double ss_cs = 0.0;
        double delta_sum = 0.0;
        for (std::size_t blk = 0; blk < blocks_per_bin; ++blk) {
            const auto block = records.subspan((bin * blocks_per_bin + blk) * m, m);
            double mc = 0.0;
            double ms = 0.0;
            double md = 0.0;
            for (const ScanRecord& r : block) {
                mc += r.j_cos;
                ms += r.j_sin;
                md += r.delta;
            }
            mc /= static_cast<double>(m);
            ms /= static_cast<double>(m);
            md /= static_cast<double>(m);
            double bc = 0.0;
            double bs = 0.0;
            double bcs = 0.0;
            for (const ScanRecord& r : block) {
                const double dc = r.j_cos - mc;
                const double ds = r.j_sin - ms;
                bc += dc * dc;
                bs += ds * ds;
                bcs += dc * ds;
            }
            const double denom = m > 1 ? static_cast<double>(m - 1) : 1.0;
            out.mean_delta.push_back(md);
            out.mean_c.push_back(mc);
            out.mean_s.push_back(ms);
            out.mean_var_c.push_back(bc / denom);
            out.mean_var_s.push_back(bs / denom);
            out.mean_n.push_back(m);
            ss_c += bc;
            ss_s += bs;
            ss_cs += bcs;
            delta_sum += md;
        }
        const std::size_t dof = config.bin_cov - blocks_per_bin;
        const double denom = dof > 0 ? static_cast<double>(dof) : 1.0;
        out.cov_delta.push_back(delta_sum / static_cast<double>(blocks_per_bin));
        out.var_c.push_back(ss_c / denom);
        out.var_s.push_back(ss_s / denom);
        out.cov_cs.push_back(ss_cs / denom);
        out.cov_n.push_back(config.bin_cov);
        out.cov_dof.push_back(dof);
    }
    return out;
}

std::vector<double> dc_profile(const ResonatorParams& params, std::span<const double> grid,
                               const DcOptions& options) {
    params.validate();
    if (!(options.delta_scale > 0.0)) {
        throw std::invalid_argument("delta_scale must be positive");
    }
    if (grid.size() >= (std::size_t{1} << 32)) {
        throw std::invalid_argument("DC grid too large");
    }
    std::vector<double> out;
    out.reserve(grid.size());
    const GaussianStream rng(options.seed, kDcNoiseStream, 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double delta = (grid[i] - options.delta_offset) / options.delta_scale;
        double level = options.gain * sql_level(delta, params);
        if (options.noise_rel > 0.0 || options.noise_abs > 0.0) {
            const auto [z0, z1] = rng.normal_pair(static_cast<std::uint32_t>(i));
            level = level * (1.0 + options.noise_rel * z0) + options.noise_abs * z1;
        }
        out.push_back(level + options.offset);
    }
    return out;
}

std::vector<double> linspace(double start, double end, std::size_t count) {
    if (count < 2) {
        throw std::invalid_argument("linspace needs at least two points");
    }
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = start + (end - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
}

}  // namespace rdtomo
