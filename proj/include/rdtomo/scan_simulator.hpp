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

// Monte Carlo generation of a linear resonator scan and the binning used to
// turn raw (J_cos, J_sin) samples into first- and second-moment curves.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rdtomo/gaussian_state.hpp"
#include "rdtomo/transfer.hpp"

namespace rdtomo {

struct ScanConfig {
    double delta_start = -8.0;
    double delta_end = 8.0;
    std::size_t n_samples = 450000;
    std::size_t bin_mean = 200;
    std::size_t bin_cov = 1000;
    std::uint64_t seed = 0;
    double electronic_noise = 0.0;  // white variance in SQL units, both components

    void validate() const;
    std::size_t n_cov_bins() const { return n_samples / bin_cov; }
    double delta_at(std::size_t index) const;
};

struct ScanRecord {
    std::size_t index = 0;
    double delta = 0.0;
    double j_cos = 0.0;
    double j_sin = 0.0;
};

/// Draws every sample of the scan. Sample i comes from the normalized
/// predicted Gaussian at delta_at(i); deterministic in config.seed.
std::vector<ScanRecord> simulate_scan(const TwoModeGaussian& state, const ResonatorParams& params,
                                      const ScanConfig& config);

/// Samples of second-moment bins [first_bin, first_bin + bin_count). Each bin
/// owns its own random substream, so partial scans concatenate exactly.
std::vector<ScanRecord> simulate_bins(const TwoModeGaussian& state, const ResonatorParams& params,
                                      const ScanConfig& config, std::size_t first_bin, std::size_t bin_count);

struct MomentCurves {
    // First moments, one entry per bin_mean samples.
    std::vector<double> mean_delta;
    std::vector<double> mean_c;
    std::vector<double> mean_s;
    std::vector<double> mean_var_c;  // sample variance inside the bin
    std::vector<double> mean_var_s;
    std::vector<std::size_t> mean_n;

    // Second moments of locally mean-subtracted samples, one entry per bin_cov samples.
    std::vector<double> cov_delta;
    std::vector<double> var_c;
    std::vector<double> var_s;
    std::vector<double> cov_cs;
    std::vector<std::size_t> cov_n;
    std::vector<std::size_t> cov_dof;  // n minus the number of subtracted local means

    std::size_t dropped_samples = 0;  // trailing samples not filling a second-moment bin
};

/// Bins records by position. Second moments subtract the mean of each
/// enclosing first-moment block and normalize by the pooled degrees of
/// freedom, which keeps them unbiased.
MomentCurves bin_moments(std::span<const ScanRecord> records, const ScanConfig& config);

struct DcOptions {
    double gain = 1.0;
    double offset = 0.0;
    double delta_scale = 1.0;   // grid units per half bandwidth
    double delta_offset = 0.0;  // grid coordinate of the LO resonance
    double noise_rel = 0.0;     // multiplicative Gaussian noise (fraction)
    double noise_abs = 0.0;     // additive Gaussian noise
    std::uint64_t seed = 0;
};

/// Reflected DC level gain * sql((g - delta_offset) / delta_scale) + offset at
/// each grid coordinate g, optionally with measurement noise.
std::vector<double> dc_profile(const ResonatorParams& params, std::span<const double> grid,
                               const DcOptions& options = {});

std::vector<double> linspace(double start, double end, std::size_t count);

}  // namespace rdtomo
