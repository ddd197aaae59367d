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
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "rdtomo/errors.hpp"
#include "rdtomo/estimator.hpp"
#include "rdtomo/measurement_model.hpp"

namespace rdtomo {
namespace {

constexpr double kPi = std::numbers::pi;
const ResonatorParams kParams{0.05, 2.9, 0.15};

Calibration exact_calibration(const ResonatorParams& p) {
    Calibration c;
    c.d = p.d;
    c.f2 = p.f2;
    return c;
}

TwoModeGaussian reference_state() {
    const Vec4 mean_sa(-0.6, 2.2, 11.8, 0.2);
    const Mat4 cov = Eigen::Vector4d(1.25, 1.28, 1.28, 1.25).asDiagonal();
    return TwoModeGaussian(basis_matrix() * mean_sa, cov);
}

// Moment curves equal to their expectations, built straight from the
// coefficient rows. Accepts any symmetric matrix, physical or not.
MomentCurves noiseless_curves(const Vec4& mean, const Mat4& cov, const ResonatorParams& p,
                              const std::vector<double>& deltas) {
    MomentCurves m;
    for (double delta : deltas) {
        const CoefficientSet cs = coefficients(delta, p);
        const Mat24 c = cs.matrix();
        const double scale = 2.0 * cs.sql;
        const Vec2 mu = c * mean / std::sqrt(scale);
        const Mat2 v = (c * cov * c.transpose() + cs.vac_cov) / scale;
        m.mean_delta.push_back(delta);
        m.mean_c.push_back(mu[0]);
        m.mean_s.push_back(mu[1]);
        m.mean_var_c.push_back(v(0, 0));
        m.mean_var_s.push_back(v(1, 1));
        m.mean_n.push_back(200);
        m.cov_delta.push_back(delta);
        m.var_c.push_back(v(0, 0));
        m.var_s.push_back(v(1, 1));
        m.cov_cs.push_back(v(0, 1));
        m.cov_n.push_back(1000);
        m.cov_dof.push_back(995);
    }
    return m;
}

std::vector<double> bin_grid(std::size_t n = 450) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = -8.0 + 16.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    }
    return g;
}

MomentCurves simulated_curves(const TwoModeGaussian& st, const ResonatorParams& p, std::uint64_t seed,
                              std::size_t n_samples = 450000) {
    ScanConfig c;
    c.seed = seed;
    c.n_samples = n_samples;
    return bin_moments(simulate_scan(st, p, c), c);
}

Mat4 random_cov(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Mat4 a;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            a(i, j) = 0.4 * n(rng);
        }
    }
    return 1.5 * Mat4::Identity() + a * a.transpose();
}

TEST(Packing, OrderAndRoundTrip) {
    EXPECT_EQ(cov10_index(0, 0), 0);
    EXPECT_EQ(cov10_index(0, 3), 3);
    EXPECT_EQ(cov10_index(3, 0), 3);
    EXPECT_EQ(cov10_index(1, 1), 4);
    EXPECT_EQ(cov10_index(1, 2), 5);
    EXPECT_EQ(cov10_index(2, 2), 7);
    EXPECT_EQ(cov10_index(3, 3), 9);
    EXPECT_THROW(cov10_index(4, 0), std::out_of_range);
    std::mt19937_64 rng(1);
    const Mat4 v = random_cov(rng);
    EXPECT_EQ(unpack_cov(pack_cov(v)), v);
}

TEST(Packing, BasisMapMatchesConjugation) {
    std::mt19937_64 rng(2);
    const Mat4 v = random_cov(rng);
    const Mat4& b = basis_matrix();
    EXPECT_LT((cov10_basis_map() * pack_cov(v) - pack_cov(b * v * b.transpose())).norm(), 1e-13);
    EXPECT_LT((cov10_basis_map() * cov10_basis_map() - Mat10::Identity()).norm(), 1e-13);
}

std::vector<double> dc_grid() {
    std::vector<double> g(2001);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = 100.0 + 40.0 * (-10.0 + 20.0 * static_cast<double>(i) / 2000.0);
    }
    return g;
}

std::vector<double> dc_level(const ResonatorParams& p, const std::vector<double>& grid, double noise_rel = 0.0,
                             std::uint64_t seed = 0) {
    DcOptions o;
    o.gain = 3.0;
    o.offset = 0.2;
    o.delta_scale = 40.0;
    o.delta_offset = 100.0;
    o.noise_rel = noise_rel;
    o.seed = seed;
    return dc_profile(p, grid, o);
}

TEST(CalibrateDc, NoiselessRecovery) {
    const auto grid = dc_grid();
    const auto level = dc_level(kParams, grid);
    CalibrationOptions o;
    o.known_f2 = 0.15;
    o.known_offset = 0.2;
    const Calibration c = calibrate_dc(grid, level, o);
    EXPECT_TRUE(c.converged);
    EXPECT_NEAR(c.d, 0.05, 1e-6);
    EXPECT_EQ(c.f2, 0.15);
    EXPECT_NEAR(c.delta_scale, 40.0, 1e-6);
    EXPECT_NEAR(c.delta_offset, 100.0, 1e-6);
    EXPECT_NEAR(c.gain, 3.0, 1e-6);
    EXPECT_LT(c.residual_rms, 1e-9);

    CalibrationOptions od;
    od.known_d = 0.05;
    od.known_offset = 0.2;
    const Calibration cf = calibrate_dc(grid, level, od);
    EXPECT_NEAR(cf.f2, 0.15, 1e-6);
}

TEST(CalibrateDc, DepthFixesOnlyTheProduct) {
    const auto grid = dc_grid();
    const auto level = dc_level(kParams, grid);
    CalibrationOptions o;
    o.known_offset = 0.2;
    const Calibration c = calibrate_dc(grid, level, o);
    EXPECT_NEAR((1.0 - c.d) * (1.0 - c.f2), 0.95 * 0.85, 1e-6);
    EXPECT_LT(c.residual_rms, 1e-7);
    // Two different (d, f2) pairs on that curve give the same profile.
    const ResonatorParams other{1.0 - 0.95 * 0.85 / 0.9, 2.9, 0.1};
    const auto level2 = dc_level(other, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_NEAR(level[i], level2[i], 1e-12);
    }
}

TEST(CalibrateDc, NoisyRecovery) {
    const auto grid = dc_grid();
    CalibrationOptions o;
    o.known_f2 = 0.15;
    o.known_offset = 0.2;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Calibration c = calibrate_dc(grid, dc_level(kParams, grid, 0.01, seed), o);
        EXPECT_NEAR(c.d, 0.05, 0.005);
        EXPECT_NEAR(c.delta_offset, 100.0, 0.5);
    }
}

TEST(CalibrateDc, FlatCurveFails) {
    const auto grid = dc_grid();
    EXPECT_THROW(calibrate_dc(grid, std::vector<double>(grid.size(), 1.0)), CalibrationError);
    DcOptions o;
    o.noise_abs = 0.05;
    const auto noisy_flat = dc_profile(kParams, linspace(1e6, 2e6, 500), o);
    EXPECT_THROW(calibrate_dc(linspace(1e6, 2e6, 500), noisy_flat), CalibrationError);
    EXPECT_THROW(calibrate_dc(std::vector<double>(4, 0.0), std::vector<double>(4, 0.0)), CalibrationError);
    std::vector<double> bad = dc_level(kParams, grid);
    bad[17] = std::nan("");
    EXPECT_THROW(calibrate_dc(grid, bad), CalibrationError);
}

TEST(CalibrateDc, NonConvergenceReportsLastIterate) {
    const auto grid = dc_grid();
    CalibrationOptions o;
    o.known_f2 = 0.15;
    o.known_offset = 0.2;
    o.lm.max_iterations = 1;
    const Calibration c = calibrate_dc(grid, dc_level(kParams, grid), o);
    EXPECT_FALSE(c.converged);
    EXPECT_EQ(c.iterations, 1);
    EXPECT_NO_THROW(c.validate());
}

TEST(CalibrationType, Validation) {
    Calibration c;
    EXPECT_NO_THROW(c.validate());
    c.d = 1.2;
    EXPECT_THROW(c.validate(), DomainError);
    c = Calibration{};
    c.f2 = 1.0;
    EXPECT_THROW(c.validate(), DomainError);
    c = Calibration{};
    c.delta_scale = 0.0;
    EXPECT_THROW(c.validate(), DomainError);
    c = Calibration{};
    c.delta_scale = 2.0;
    c.delta_offset = 1.0;
    EXPECT_EQ(c.to_delta(5.0), 2.0);
}

TEST(FitMoments, NoiselessInversionIsExact) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 3.0);
    for (int t = 0; t < 5; ++t) {
        const Vec4 mean(n(rng), n(rng), n(rng), n(rng));
        const Mat4 cov = random_cov(rng);
        const MomentCurves m = noiseless_curves(mean, cov, kParams, bin_grid());
        for (Weighting w : {Weighting::Empirical, Weighting::Model, Weighting::Uniform}) {
            FitOptions o;
            o.weighting = w;
            const FitResult r = fit_moments(m, exact_calibration(kParams), 2.9, o);
            EXPECT_LT((r.first.mean_sb - mean).norm(), 1e-9);
            EXPECT_LT((r.second.matrix(Basis::Sideband) - cov).norm(), 1e-9);
            EXPECT_EQ(r.second.rank, 10);
            EXPECT_FALSE(r.second.rank_deficient);
            EXPECT_LT(r.second.chi2_per_dof[0], 1e-12);
        }
    }
}

TEST(FitMoments, VacuumTruth) {
    const MomentCurves m = simulated_curves(TwoModeGaussian::vacuum(), kParams, 12);
    const FitResult r = fit_moments(m, exact_calibration(kParams), 2.9);
    const Vec4 se = r.first.se(Basis::SymAntisym);
    for (int k = 0; k < 4; ++k) {
        EXPECT_LT(std::abs(r.first.mean_sa[k]), 3.0 * se[k]);
    }
    const Vec10 truth = pack_cov(Mat4::Identity());
    const Vec10 cse = r.second.se(Basis::Sideband);
    for (int j = 0; j < 10; ++j) {
        EXPECT_LT(std::abs(r.second.cov10_sb[j] - truth[j]), 3.0 * cse[j]) << j;
    }
    EXPECT_TRUE(r.warnings.empty() || !r.second.admissible);
}

TEST(FitMoments, ReferenceStateRoundTrip) {
    const TwoModeGaussian truth = reference_state();
    const MomentCurves m = simulated_curves(truth, kParams, 5);
    const FitResult r = fit_moments(m, exact_calibration(kParams), 2.9);
    const Vec4 mse = r.first.se(Basis::SymAntisym);
    const Vec4 true_mean = truth.in_basis(Basis::SymAntisym).mean();
    for (int k = 0; k < 4; ++k) {
        EXPECT_LT(std::abs(r.first.mean_sa[k] - true_mean[k]), 3.0 * mse[k]) << k;
    }
    const Vec10 t = pack_cov(truth.cov());
    const Vec10 se = r.second.se(Basis::Sideband);
    for (int j = 0; j < 10; ++j) {
        EXPECT_LT(std::abs(r.second.cov10_sb[j] - t[j]), 3.0 * se[j]) << j;
    }
    EXPECT_LT(std::abs(r.second.imbalance), 3.0 * r.second.imbalance_se);
    for (double c : r.second.chi2_per_dof) {
        EXPECT_NEAR(c, 1.0, 0.25);
    }
}

TEST(FitMoments, BasisIdentityAndEquivariance) {
    const MomentCurves m = simulated_curves(reference_state(), kParams, 6);
    FitOptions sb_opts;
    FitOptions sa_opts;
    sa_opts.design_basis = Basis::SymAntisym;
    const FitResult a = fit_moments(m, exact_calibration(kParams), 2.9, sb_opts);
    const FitResult b = fit_moments(m, exact_calibration(kParams), 2.9, sa_opts);
    EXPECT_LT((basis_matrix() * a.first.mean_sa - a.first.mean_sb).norm(), 1e-12);
    EXPECT_LT((a.first.mean_sa - b.first.mean_sa).norm(), 1e-8);
    EXPECT_LT((a.first.mean_sb - b.first.mean_sb).norm(), 1e-8);
    EXPECT_LT((a.second.cov10_sa - b.second.cov10_sa).norm(), 1e-8);
    EXPECT_LT((a.second.cov10_sb - b.second.cov10_sb).norm(), 1e-8);
    EXPECT_LT((a.second.param_cov_sa - b.second.param_cov_sa).norm(), 1e-8);
    const Mat4& bm = basis_matrix();
    EXPECT_LT((bm * a.second.matrix(Basis::Sideband) * bm.transpose() - a.second.matrix(Basis::SymAntisym)).norm(),
              1e-12);
}

TEST(FitMoments, LinearInTheRecords) {
    ScanConfig c;
    c.seed = 8;
    auto rec = simulate_scan(reference_state(), kParams, c);
    const double k = 1.7;
    FitOptions o;
    o.subtract_vacuum = false;
    for (Weighting w : {Weighting::Empirical, Weighting::Model}) {
        o.weighting = w;
        const FitResult a = fit_moments(bin_moments(rec, c), exact_calibration(kParams), 2.9, o);
        auto scaled = rec;
        for (auto& r : scaled) {
            r.j_cos *= k;
            r.j_sin *= k;
        }
        const FitResult b = fit_moments(bin_moments(scaled, c), exact_calibration(kParams), 2.9, o);
        EXPECT_LT((b.first.mean_sb - k * a.first.mean_sb).norm(), 1e-9 * a.first.mean_sb.norm());
        EXPECT_LT((b.second.cov10_sb - k * k * a.second.cov10_sb).norm(), 1e-9 * a.second.cov10_sb.norm());
    }
}

TEST(FitMoments, NegativeVarianceIsAModelMismatch) {
    Mat4 v = Mat4::Identity();
    v(1, 1) = -0.5;
    const MomentCurves m = noiseless_curves(Vec4::Zero(), v, kParams, bin_grid());
    EXPECT_THROW(fit_second_moments(m, exact_calibration(kParams), 2.9), ModelMismatch);
}

TEST(FitMoments, InadmissibleEstimateIsReported) {
    const Mat4 v = Eigen::Vector4d(0.5, 0.5, 1.0, 1.0).asDiagonal();
    const MomentCurves m = noiseless_curves(Vec4::Zero(), v, kParams, bin_grid());
    const FitResult r = fit_moments(m, exact_calibration(kParams), 2.9);
    EXPECT_FALSE(r.second.admissible);
    EXPECT_NEAR(r.second.min_symplectic_eigenvalue, 0.5, 1e-8);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(FitMoments, PsdProjection) {
    Mat4 v = 1.2 * Mat4::Identity();
    v(0, 1) = v(1, 0) = 1.7;  // eigenvalue -0.5
    const MomentCurves m = noiseless_curves(Vec4::Zero(), v, kParams, bin_grid());
    FitOptions o;
    const SecondMomentFit raw = fit_second_moments(m, exact_calibration(kParams), 2.9, o);
    EXPECT_FALSE(raw.psd_projected);
    EXPECT_LT((raw.projected_sb - v).norm(), 1e-9);
    o.psd_projection = true;
    const SecondMomentFit p = fit_second_moments(m, exact_calibration(kParams), 2.9, o);
    EXPECT_TRUE(p.psd_projected);
    EXPECT_TRUE(p.psd_projection_flag);
    EXPECT_LT((p.matrix(Basis::Sideband) - v).norm(), 1e-9);  // raw estimate kept
    const Eigen::SelfAdjointEigenSolver<Mat4> eig(p.projected_sb);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
    EXPECT_NEAR(p.projected_sb(0, 0), 1.45, 1e-9);

    // a PSD estimate is left alone and not flagged
    const MomentCurves ok = noiseless_curves(Vec4::Zero(), 1.2 * Mat4::Identity(), kParams, bin_grid());
    const SecondMomentFit q = fit_second_moments(ok, exact_calibration(kParams), 2.9, o);
    EXPECT_FALSE(q.psd_projection_flag);
    EXPECT_LT((q.projected_sb - 1.2 * Mat4::Identity()).norm(), 1e-9);
}

TEST(FitMoments, ElectronicNoiseOffset) {
    std::vector<double> g = bin_grid();
    MomentCurves m = noiseless_curves(Vec4::Zero(), 1.3 * Mat4::Identity(), kParams, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        m.var_c[i] += 0.2;
        m.var_s[i] += 0.2;
    }
    FitOptions o;
    o.electronic_noise = 0.2;
    const SecondMomentFit r = fit_second_moments(m, exact_calibration(kParams), 2.9, o);
    EXPECT_LT((r.matrix(Basis::Sideband) - 1.3 * Mat4::Identity()).norm(), 1e-9);
}

TEST(FitMoments, SkipsBinsWithoutReflectedLo) {
    const ResonatorParams p{0.0, 2.9, 0.0};
    std::vector<double> g = bin_grid(449);
    g.push_back(0.0);
    std::sort(g.begin(), g.end());
    MomentCurves m = noiseless_curves(Vec4(1, 2, 3, 4), 1.1 * Mat4::Identity(), p, g);
    for (auto* v : {&m.mean_c, &m.mean_s, &m.var_c, &m.var_s, &m.cov_cs, &m.mean_var_c, &m.mean_var_s}) {
        for (double& x : *v) {
            if (!std::isfinite(x)) {
                x = 1.0;  // the sql = 0 bin; its value must not matter
            }
        }
    }
    const FitResult r = fit_moments(m, exact_calibration(p), 2.9);
    EXPECT_LT((r.first.mean_sb - Vec4(1, 2, 3, 4)).norm(), 1e-8);
    EXPECT_LT((r.second.matrix(Basis::Sideband) - 1.1 * Mat4::Identity()).norm(), 1e-8);
}

TEST(FitMoments, CalibrationAxisIsApplied) {
    Calibration c = exact_calibration(kParams);
    c.delta_scale = 40.0;
    c.delta_offset = 100.0;
    const std::vector<double> g = bin_grid();
    MomentCurves m = noiseless_curves(Vec4(0.5, -1.0, 2.0, 0.0), 1.2 * Mat4::Identity(), kParams, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        m.mean_delta[i] = 100.0 + 40.0 * g[i];
        m.cov_delta[i] = 100.0 + 40.0 * g[i];
    }
    const FitResult r = fit_moments(m, c, 2.9);
    EXPECT_LT((r.first.mean_sb - Vec4(0.5, -1.0, 2.0, 0.0)).norm(), 1e-9);
}

TEST(Identifiability, ReferenceParametersAreComplete) {
    const auto grid = linspace(-8.0, 8.0, 401);
    const IdentifiabilityReport r = identifiability_report(kParams, grid);
    EXPECT_EQ(r.second_rank, 10);
    EXPECT_EQ(r.first_rank, 4);
    EXPECT_EQ(r.points_used, 401u);
    EXPECT_EQ(r.second_singular_values[0], 1.0);
}

TEST(Identifiability, LosslessResonatorIsIncomplete) {
    const auto grid = linspace(-8.0, 8.0, 401);
    const IdentifiabilityReport r = identifiability_report({1.0, 2.9, 0.0}, grid);
    EXPECT_LT(r.second_rank, 10);
    EXPECT_EQ(r.second_rank, 9);
    EXPECT_EQ(r.first_rank, 4);
}

TEST(Identifiability, FirstMomentRankForLossyResonators) {
    const auto grid = linspace(-8.0, 8.0, 401);
    for (double d : {0.0, 0.05, 0.5, 0.9}) {
        for (double f2 : {0.0, 0.15}) {
            EXPECT_EQ(identifiability_report({d, 2.9, f2}, grid).first_rank, 4) << d << " " << f2;
        }
    }
    const IdentifiabilityReport z = identifiability_report({0.0, 2.9, 0.0}, grid);
    EXPECT_EQ(z.points_skipped, 1u);
}

// Rank of a stack of quadratic rows in the packed covariance.
int stack_rank(const std::vector<Eigen::Matrix<double, 1, 10>>& rows) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), 10);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        a.row(static_cast<Eigen::Index>(i)) = rows[i];
    }
    Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
    return static_cast<int>((sv.array() > kRankThreshold * sv[0]).count());
}

Eigen::Matrix<double, 1, 10> variance_row(const Vec4& u) {
    Eigen::Matrix<double, 1, 10> row;
    for (int j = 0; j < 10; ++j) {
        int k = 0, l = 0;
        for (int a = 0; a < 4; ++a) {
            for (int b = a; b < 4; ++b) {
                if (cov10_index(a, b) == j) {
                    k = a;
                    l = b;
                }
            }
        }
        row[j] = (k == l ? 1.0 : 2.0) * u[k] * u[l];
    }
    return row;
}

TEST(Identifiability, ThetaSweepAddsNoRank) {
    for (const ResonatorParams& p : {kParams, ResonatorParams{1.0, 2.9, 0.0}}) {
        std::vector<Eigen::Matrix<double, 1, 10>> triple;
        std::vector<Eigen::Matrix<double, 1, 10>> with_theta;
        for (double delta : linspace(-8.0, 8.0, 161)) {
            const CoefficientSet cs = coefficients(delta, p);
            const Vec4 a = cs.c_cos / std::sqrt(2.0 * cs.sql);
            const Vec4 b = cs.c_sin / std::sqrt(2.0 * cs.sql);
            const auto vc = variance_row(a);
            const auto vs = variance_row(b);
            const auto cross = 0.5 * (variance_row(a + b) - vc - vs);
            triple.insert(triple.end(), {vc, vs, cross});
            with_theta.insert(with_theta.end(), {vc, vs, cross});
            for (double theta = 0.1; theta < kPi; theta += 0.3) {
                with_theta.push_back(variance_row(std::cos(theta) * a + std::sin(theta) * b));
            }
        }
        EXPECT_EQ(stack_rank(triple), stack_rank(with_theta));
        EXPECT_EQ(stack_rank(triple), identifiability_report(p, linspace(-8.0, 8.0, 161)).second_rank);
    }
}

TEST(Identifiability, EqualPhaseHomodyneFamilyIsIncomplete) {
    std::vector<Eigen::Matrix<double, 1, 10>> equal;
    std::vector<Eigen::Matrix<double, 1, 10>> general;
    for (double phi = 0.0; phi < 2.0 * kPi; phi += 0.2) {
        for (double theta = 0.0; theta < kPi; theta += 0.2) {
            const auto u = [&](double varphi, double ph) {
                return Vec4(std::cos(theta) * std::cos(varphi), std::cos(theta) * std::sin(varphi),
                            std::sin(theta) * std::cos(ph), std::sin(theta) * std::sin(ph));
            };
            equal.push_back(variance_row(u(phi, phi)));
            general.push_back(variance_row(u(phi, phi)));
            general.push_back(variance_row(u(phi, phi + kPi / 2.0)));
        }
    }
    EXPECT_EQ(stack_rank(equal), 9);
    EXPECT_EQ(stack_rank(general), 10);
    Vec10 blind = Vec10::Zero();
    blind[cov10_index(0, 3)] = 1.0;
    blind[cov10_index(1, 2)] = -1.0;
    for (const auto& r : equal) {
        EXPECT_NEAR(r.dot(blind), 0.0, 1e-14);
    }
}

}  // namespace
}  // namespace rdtomo
