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

// Inversion of the measurement model: resonator calibration from the
// reflected DC level, then linear fits of the two-mode means and covariance
// to the binned moment curves.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rdtomo/gaussian_state.hpp"
#include "rdtomo/least_squares.hpp"
#include "rdtomo/scan_simulator.hpp"
#include "rdtomo/transfer.hpp"

namespace rdtomo {

using Vec10 = Eigen::Matrix<double, 10, 1>;
using Mat10 = Eigen::Matrix<double, 10, 10>;

struct Calibration {
    double d = 0.05;
    double f2 = 0.15;
    double delta_scale = 1.0;   // grid units per half bandwidth
    double delta_offset = 0.0;  // grid coordinate of the LO resonance
    double gain = 1.0;
    double offset = 0.0;
    double residual_rms = 0.0;
    int iterations = 0;
    bool converged = true;

    void validate() const;
    double to_delta(double grid) const { return (grid - delta_offset) / delta_scale; }
    ResonatorParams resonator(double omega_ratio) const { return {d, omega_ratio, f2}; }
};

/// Which of the DC model parameters are held at known values.
struct CalibrationOptions {
    std::optional<double> known_d;
    std::optional<double> known_f2;
    std::optional<double> known_gain;
    std::optional<double> known_offset = 0.0;
    LmOptions lm;
};

/// Damped least-squares fit of gain * sql((g - delta_offset) / delta_scale) + offset.
///
/// The dip depth only fixes (1 - d)(1 - f2), so d and f2 cannot both be free
/// without an external constraint; a fit with both free lands somewhere on
/// that curve. Throws CalibrationError when no dip stands out of the noise.
Calibration calibrate_dc(std::span<const double> grid, std::span<const double> level,
                         const CalibrationOptions& options = {});

/// Noise level of a smooth curve from the median absolute point-to-point difference.
double robust_noise(std::span<const double> level);

// Empirical: per-bin sample variances. Model: second moments reweighted twice
// from the fitted prediction, which removes the correlation between the
// weights and the observations. Uniform: unit weights, errors scaled by chi2.
enum class Weighting { Empirical, Model, Uniform };

struct FitOptions {
    Weighting weighting = Weighting::Model;
    Basis design_basis = Basis::Sideband;
    bool subtract_vacuum = true;
    double electronic_noise = 0.0;  // normalized white variance removed from var_c and var_s
    bool psd_projection = false;
    double max_condition = 1e8;
};

struct FirstMomentFit {
    Vec4 mean_sb = Vec4::Zero();
    Vec4 mean_sa = Vec4::Zero();
    Mat4 cov_sb = Mat4::Zero();  // parameter covariance of the estimate
    Mat4 cov_sa = Mat4::Zero();
    double chi2_cos = 0.0;
    double chi2_sin = 0.0;
    int dof = 0;
    double condition = 0.0;
    double sigma_min = 0.0;
    int rank = 0;
    bool rank_deficient = false;

    const Vec4& mean(Basis b) const { return b == Basis::Sideband ? mean_sb : mean_sa; }
    Vec4 se(Basis b) const;
};

struct SecondMomentFit {
    Vec10 cov10_sb = Vec10::Zero();  // upper triangle, row major
    Vec10 cov10_sa = Vec10::Zero();
    Mat10 param_cov_sb = Mat10::Zero();
    Mat10 param_cov_sa = Mat10::Zero();
    std::array<double, 3> chi2_per_dof{};  // var_c, var_s, cov_cs
    double condition = 0.0;
    double sigma_min = 0.0;
    int rank = 0;
    bool rank_deficient = false;

    double imbalance = 0.0;  // (V[p+] + V[q+]) - (V[p-] + V[q-])
    double imbalance_se = 0.0;

    double min_symplectic_eigenvalue = 0.0;
    bool admissible = false;

    bool psd_projected = false;        // projection requested and applied
    bool psd_projection_flag = false;  // an eigenvalue moved by more than its standard error
    Mat4 projected_sb = Mat4::Zero();

    const Vec10& cov10(Basis b) const { return b == Basis::Sideband ? cov10_sb : cov10_sa; }
    Vec10 se(Basis b) const;
    Mat4 matrix(Basis b) const;
};

struct FitResult {
    Calibration calibration;
    double omega_ratio = 0.0;
    FirstMomentFit first;
    SecondMomentFit second;
    std::vector<std::string> warnings;
};

/// Index of (row, col) in the upper-triangle packing, order (0,0),(0,1),...,(3,3).
int cov10_index(int row, int col);
Vec10 pack_cov(const Mat4& cov);
Mat4 unpack_cov(const Vec10& packed);

/// Linear map of packed covariances from the sideband to the S/A basis (and back).
const Mat10& cov10_basis_map();

FirstMomentFit fit_first_moments(const MomentCurves& curves, const Calibration& calib, double omega_ratio,
                                 const FitOptions& options = {});

/// Throws ModelMismatch when a fitted diagonal is negative by more than 3 se.
SecondMomentFit fit_second_moments(const MomentCurves& curves, const Calibration& calib, double omega_ratio,
                                   const FitOptions& options = {});

FitResult fit_moments(const MomentCurves& curves, const Calibration& calib, double omega_ratio,
                      const FitOptions& options = {});

struct IdentifiabilityReport {
    Eigen::VectorXd second_singular_values;  // normalized to the largest
    int second_rank = 0;
    Eigen::VectorXd first_singular_values;
    int first_rank = 0;
    std::size_t points_used = 0;
    std::size_t points_skipped = 0;  // grid points where the reflected LO vanishes
};

inline constexpr double kRankThreshold = 1e-6;

/// Rank of the noiseless normalized moment designs over the grid.
IdentifiabilityReport identifiability_report(const ResonatorParams& params, std::span<const double> grid,
                                             double threshold = kRankThreshold);

}  // namespace rdtomo
