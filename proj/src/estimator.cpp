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

#include "rdtomo/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rdtomo/errors.hpp"
#include "rdtomo/measurement_model.hpp"

namespace rdtomo {

namespace {

constexpr int kPairs[10][2] = {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}};
constexpr double kMinSql = 1e-14;

double median(std::vector<double> v) {
    if (v.empty()) {
        return 0.0;
    }
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), mid));
    }
    return m;
}

// Normalized (cos, sin) coefficient rows in the requested basis, or nothing
// where the reflected LO power vanishes.
struct Rows {
    Vec4 a;
    Vec4 b;
    Mat2 vac;
};

std::optional<Rows> normalized_rows(double delta, const ResonatorParams& params, Basis basis) {
    const CoefficientSet cs = coefficients(delta, params);
    if (!(cs.sql > kMinSql)) {
        return std::nullopt;
    }
    const double norm = 1.0 / std::sqrt(2.0 * cs.sql);
    Rows rows{cs.c_cos * norm, cs.c_sin * norm, cs.vac_cov / (2.0 * cs.sql)};
    if (basis == Basis::SymAntisym) {
        rows.a = basis_matrix().transpose() * rows.a;
        rows.b = basis_matrix().transpose() * rows.b;
    }
    return rows;
}

Eigen::Matrix<double, 1, 10> quadratic_row(const Vec4& a, const Vec4& b) {
    Eigen::Matrix<double, 1, 10> row;
    for (int j = 0; j < 10; ++j) {
        const int k = kPairs[j][0];
        const int l = kPairs[j][1];
        row[j] = k == l ? a[k] * b[k] : a[k] * b[l] + a[l] * b[k];
    }
    return row;
}

// Standard errors of the eigenvalues of the packed covariance, first order.
Vec4 eigenvalue_se(const Eigen::Matrix4d& vectors, const Mat10& param_cov) {
    Vec4 se;
    for (int e = 0; e < 4; ++e) {
        Vec10 grad;
        for (int j = 0; j < 10; ++j) {
            const int k = kPairs[j][0];
            const int l = kPairs[j][1];
            grad[j] = (k == l ? 1.0 : 2.0) * vectors(k, e) * vectors(l, e);
        }
        se[e] = std::sqrt(std::max(0.0, grad.dot(param_cov * grad)));
    }
    return se;
}

}  // namespace

void Calibration::validate() const {
    if (!(d >= 0.0 && d <= 1.0)) {
        throw DomainError("calibration d must lie in [0, 1]");
    }
    if (!(f2 >= 0.0 && f2 < 1.0)) {
        throw DomainError("calibration f2 must lie in [0, 1)");
    }
    if (!(delta_scale > 0.0) || !std::isfinite(delta_scale)) {
        throw DomainError("calibration delta_scale must be positive");
    }
    if (!std::isfinite(delta_offset) || !std::isfinite(gain) || !std::isfinite(offset)) {
        throw DomainError("calibration values must be finite");
    }
}

double robust_noise(std::span<const double> level) {
    if (level.size() < 2) {
        return 0.0;
    }
    std::vector<double> diffs;
    diffs.reserve(level.size() - 1);
    for (std::size_t i = 1; i < level.size(); ++i) {
        diffs.push_back(std::abs(level[i] - level[i - 1]));
    }
    return median(std::move(diffs)) / (0.6744897501960817 * std::sqrt(2.0));
}

Calibration calibrate_dc(std::span<const double> grid, std::span<const double> level,
                         const CalibrationOptions& options) {
    if (grid.size() != level.size()) {
        throw CalibrationError("DC grid and level differ in length");
    }
    const std::size_t n = grid.size();
    if (n < 8) {
        throw CalibrationError("DC profile needs at least 8 points");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(grid[i]) || !std::isfinite(level[i])) {
            throw CalibrationError("DC profile contains non-finite values (row " + std::to_string(i) + ")");
        }
    }

    // Dip depth below the median, on a short moving average so that the
    // extremes of pure noise do not count as a dip.
    const double noise = robust_noise(level);
    const std::size_t window = std::clamp<std::size_t>(n / 50, 1, 16);
    double running = 0.0;
    double smooth_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        running += level[i];
        if (i >= window) {
            running -= level[i - window];
        }
        if (i + 1 >= window) {
            smooth_min = std::min(smooth_min, running / static_cast<double>(window));
        }
    }
    const double dip = median(std::vector<double>(level.begin(), level.end())) - smooth_min;
    if (!(dip > 3.0 * noise) || !(dip > 0.0)) {
        throw CalibrationError("no resonance dip detected: depth " + std::to_string(dip) +
                               " is below 3x the noise level " + std::to_string(noise));
    }

    // Starting point from the shape of the dip.
    std::vector<double> sorted(level.begin(), level.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t top = std::max<std::size_t>(1, n / 10);
    double base = 0.0;
    for (std::size_t i = n - top; i < n; ++i) {
        base += sorted[i];
    }
    base /= static_cast<double>(top);
    const auto lo_it = std::min_element(level.begin(), level.end());
    const std::size_t imin = static_cast<std::size_t>(lo_it - level.begin());
    const double depth = base - *lo_it;
    const double half = base - 0.5 * depth;
    std::size_t left = imin;
    while (left > 0 && level[left] < half) {
        --left;
    }
    std::size_t right = imin;
    while (right + 1 < n && level[right] < half) {
        ++right;
    }
    double width = 0.5 * std::abs(grid[right] - grid[left]);
    const double span = std::abs(grid[n - 1] - grid[0]);
    if (!(width > 0.0)) {
        width = span / 20.0;
    }

    double gain0 = options.known_gain.value_or(0.0);
    double offset0 = options.known_offset.value_or(0.0);
    if (!options.known_gain) {
        gain0 = base - offset0;
    } else if (!options.known_offset) {
        offset0 = base - gain0;
    }
    if (!(gain0 > 0.0)) {
        gain0 = std::max(base, depth);
    }
    const double a0 = std::clamp(depth / gain0, 1e-6, 1.0);
    double d0 = 0.0;
    double f20 = 0.0;
    if (options.known_d && options.known_f2) {
        d0 = *options.known_d;
        f20 = *options.known_f2;
    } else if (options.known_f2) {
        f20 = *options.known_f2;
        d0 = std::clamp(1.0 - a0 / (1.0 - f20), 0.0, 1.0);
    } else if (options.known_d) {
        d0 = *options.known_d;
        f20 = std::clamp(1.0 - a0 / std::max(1e-12, 1.0 - d0), 0.0, 0.999);
    } else {
        d0 = f20 = std::clamp(1.0 - std::sqrt(a0), 0.0, 0.999);
    }

    // Full vector (d, f2, scale, center, gain, offset).
    Eigen::Matrix<double, 6, 1> full;
    full << d0, f20, width, grid[imin], gain0, offset0;
    const std::optional<double> fixed[6] = {options.known_d,  options.known_f2,   std::nullopt,
                                            std::nullopt,     options.known_gain, options.known_offset};
    std::vector<int> free;
    for (int k = 0; k < 6; ++k) {
        if (!fixed[k]) {
            free.push_back(k);
        } else {
            full[k] = *fixed[k];
        }
    }
    const auto expand = [&](const Eigen::VectorXd& x) {
        Eigen::Matrix<double, 6, 1> p = full;
        for (std::size_t i = 0; i < free.size(); ++i) {
            p[free[i]] = x[static_cast<Eigen::Index>(i)];
        }
        return p;
    };

    LmProblem problem;
    problem.evaluate = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
        const Eigen::Matrix<double, 6, 1> p = expand(x);
        const double d = p[0];
        const double f2 = p[1];
        const double scale = p[2];
        const double gain = p[4];
        const double amp = (1.0 - f2) * (1.0 - d);
        r.resize(static_cast<Eigen::Index>(n));
        jac.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(free.size()));
        for (std::size_t i = 0; i < n; ++i) {
            const double x_i = (grid[i] - p[3]) / scale;
            const double lor = 1.0 / (1.0 + x_i * x_i);
            const double sql = 1.0 - amp * lor;
            const double dsql_dx = 2.0 * amp * x_i * lor * lor;
            const double deriv[6] = {
                gain * (1.0 - f2) * lor,
                gain * (1.0 - d) * lor,
                gain * dsql_dx * (-x_i / scale),
                gain * dsql_dx * (-1.0 / scale),
                sql,
                1.0,
            };
            const auto row = static_cast<Eigen::Index>(i);
            r[row] = gain * sql + p[5] - level[i];
            for (std::size_t k = 0; k < free.size(); ++k) {
                jac(row, static_cast<Eigen::Index>(k)) = deriv[free[k]];
            }
        }
    };
    problem.project = [&](Eigen::VectorXd& x) {
        const double min_scale = 1e-12 * std::max(span, 1e-300);
        for (std::size_t k = 0; k < free.size(); ++k) {
            double& v = x[static_cast<Eigen::Index>(k)];
            switch (free[k]) {
                case 0: v = std::clamp(v, 0.0, 1.0); break;
                case 1: v = std::clamp(v, 0.0, 1.0 - 1e-9); break;
                case 2: v = std::max(std::abs(v), min_scale); break;
                default: break;
            }
        }
    };

    Eigen::VectorXd start(static_cast<Eigen::Index>(free.size()));
    for (std::size_t k = 0; k < free.size(); ++k) {
        start[static_cast<Eigen::Index>(k)] = full[free[k]];
    }
    const LmResult lm = levenberg_marquardt(problem, start, options.lm);
    const Eigen::Matrix<double, 6, 1> p = expand(lm.params);

    Calibration calib;
    calib.d = p[0];
    calib.f2 = p[1];
    calib.delta_scale = p[2];
    calib.delta_offset = p[3];
    calib.gain = p[4];
    calib.offset = p[5];
    calib.residual_rms = std::sqrt(2.0 * lm.cost / static_cast<double>(n));
    calib.iterations = lm.iterations;
    calib.converged = lm.converged;
    calib.validate();
    return calib;
}

int cov10_index(int row, int col) {
    if (row > col) {
        std::swap(row, col);
    }
    for (int j = 0; j < 10; ++j) {
        if (kPairs[j][0] == row && kPairs[j][1] == col) {
            return j;
        }
    }
    throw std::out_of_range("covariance index outside 4x4");
}

Vec10 pack_cov(const Mat4& cov) {
    Vec10 out;
    for (int j = 0; j < 10; ++j) {
        out[j] = cov(kPairs[j][0], kPairs[j][1]);
    }
    return out;
}

Mat4 unpack_cov(const Vec10& packed) {
    Mat4 out;
    for (int j = 0; j < 10; ++j) {
        out(kPairs[j][0], kPairs[j][1]) = packed[j];
        out(kPairs[j][1], kPairs[j][0]) = packed[j];
    }
    return out;
}

const Mat10& cov10_basis_map() {
    static const Mat10 map = [] {
        Mat10 m;
        const Mat4& b = basis_matrix();
        for (int j = 0; j < 10; ++j) {
            const Mat4 unit = unpack_cov(Vec10::Unit(j));
            m.col(j) = pack_cov(b * unit * b.transpose());
        }
        return m;
    }();
    return map;
}

Vec4 FirstMomentFit::se(Basis b) const {
    return (b == Basis::Sideband ? cov_sb : cov_sa).diagonal().cwiseMax(0.0).cwiseSqrt();
}

Vec10 SecondMomentFit::se(Basis b) const {
    return (b == Basis::Sideband ? param_cov_sb : param_cov_sa).diagonal().cwiseMax(0.0).cwiseSqrt();
}

Mat4 SecondMomentFit::matrix(Basis b) const { return unpack_cov(cov10(b)); }

FirstMomentFit fit_first_moments(const MomentCurves& curves, const Calibration& calib, double omega_ratio,
                                 const FitOptions& options) {
    calib.validate();
    const ResonatorParams params = calib.resonator(omega_ratio);
    params.validate();
    const std::size_t n_bins = curves.mean_delta.size();
    if (curves.mean_c.size() != n_bins || curves.mean_s.size() != n_bins || curves.mean_var_c.size() != n_bins ||
        curves.mean_var_s.size() != n_bins || curves.mean_n.size() != n_bins) {
        throw std::invalid_argument("first-moment curves differ in length");
    }

    std::vector<Rows> rows;
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < n_bins; ++i) {
        if (auto r = normalized_rows(calib.to_delta(curves.mean_delta[i]), params, options.design_basis)) {
            rows.push_back(*r);
            used.push_back(i);
        }
    }
    const auto m = static_cast<Eigen::Index>(used.size());
    Eigen::MatrixXd design(2 * m, 4);
    Eigen::VectorXd obs(2 * m);
    Eigen::VectorXd w(2 * m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const std::size_t i = used[static_cast<std::size_t>(k)];
        design.row(2 * k) = rows[static_cast<std::size_t>(k)].a.transpose();
        design.row(2 * k + 1) = rows[static_cast<std::size_t>(k)].b.transpose();
        obs[2 * k] = curves.mean_c[i];
        obs[2 * k + 1] = curves.mean_s[i];
        const double count = static_cast<double>(curves.mean_n[i]);
        if (options.weighting == Weighting::Uniform) {
            w[2 * k] = w[2 * k + 1] = 1.0;
        } else {
            if (!(curves.mean_var_c[i] > 0.0) || !(curves.mean_var_s[i] > 0.0)) {
                throw std::invalid_argument("first-moment bin " + std::to_string(i) + " has no sample variance");
            }
            w[2 * k] = count / curves.mean_var_c[i];
            w[2 * k + 1] = count / curves.mean_var_s[i];
        }
    }
    const LinearFit fit = weighted_least_squares(design, obs, w, 1e-12, options.max_condition);

    FirstMomentFit out;
    Mat4 pcov = fit.param_cov;
    if (options.weighting == Weighting::Uniform && fit.dof > 0) {
        pcov *= fit.chi2 / fit.dof;
    }
    const Mat4& b = basis_matrix();
    const Vec4 x = fit.params;
    if (options.design_basis == Basis::Sideband) {
        out.mean_sb = x;
        out.cov_sb = pcov;
        out.mean_sa = b * x;
        out.cov_sa = b * pcov * b.transpose();
    } else {
        out.mean_sa = x;
        out.cov_sa = pcov;
        out.mean_sb = b * x;
        out.cov_sb = b * pcov * b.transpose();
    }
    const Eigen::VectorXd resid = obs - design * fit.params;
    for (Eigen::Index k = 0; k < m; ++k) {
        out.chi2_cos += w[2 * k] * resid[2 * k] * resid[2 * k];
        out.chi2_sin += w[2 * k + 1] * resid[2 * k + 1] * resid[2 * k + 1];
    }
    out.dof = fit.dof;
    out.condition = fit.condition;
    out.sigma_min = fit.singular_values.size() > 0 ? fit.singular_values[fit.singular_values.size() - 1] : 0.0;
    out.rank = fit.rank;
    out.rank_deficient = fit.rank_deficient;
    return out;
}

SecondMomentFit fit_second_moments(const MomentCurves& curves, const Calibration& calib, double omega_ratio,
                                   const FitOptions& options) {
    calib.validate();
    const ResonatorParams params = calib.resonator(omega_ratio);
    params.validate();
    const std::size_t n_bins = curves.cov_delta.size();
    if (curves.var_c.size() != n_bins || curves.var_s.size() != n_bins || curves.cov_cs.size() != n_bins ||
        curves.cov_dof.size() != n_bins) {
        throw std::invalid_argument("second-moment curves differ in length");
    }

    std::vector<Rows> rows;
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < n_bins; ++i) {
        if (auto r = normalized_rows(calib.to_delta(curves.cov_delta[i]), params, options.design_basis)) {
            rows.push_back(*r);
            used.push_back(i);
        }
    }
    const auto m = static_cast<Eigen::Index>(used.size());
    Eigen::MatrixXd design(3 * m, 10);
    Eigen::VectorXd obs(3 * m);
    Eigen::VectorXd w(3 * m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const std::size_t i = used[static_cast<std::size_t>(k)];
        const Rows& r = rows[static_cast<std::size_t>(k)];
        design.row(3 * k) = quadratic_row(r.a, r.a);
        design.row(3 * k + 1) = quadratic_row(r.b, r.b);
        design.row(3 * k + 2) = quadratic_row(r.a, r.b);
        double vc = curves.var_c[i];
        double vs = curves.var_s[i];
        double cs = curves.cov_cs[i];
        obs[3 * k] = vc - options.electronic_noise;
        obs[3 * k + 1] = vs - options.electronic_noise;
        obs[3 * k + 2] = cs;
        if (options.subtract_vacuum) {
            obs[3 * k] -= r.vac(0, 0);
            obs[3 * k + 1] -= r.vac(1, 1);
            obs[3 * k + 2] -= r.vac(0, 1);
        }
        if (options.weighting == Weighting::Uniform) {
            w.segment<3>(3 * k).setOnes();
        } else {
            const double dof = static_cast<double>(curves.cov_dof[i]);
            if (!(vc > 0.0) || !(vs > 0.0) || !(dof > 0.0)) {
                throw std::invalid_argument("second-moment bin " + std::to_string(i) + " has no spread");
            }
            w[3 * k] = dof / (2.0 * vc * vc);
            w[3 * k + 1] = dof / (2.0 * vs * vs);
            w[3 * k + 2] = dof / (vc * vs + cs * cs);
        }
    }
    // The symmetric row (a, a) gives 2 a_k a_l off the diagonal, matching
    // Var(a.x) = sum_k a_k^2 V_kk + 2 sum_{k<l} a_k a_l V_kl.
    LinearFit fit = weighted_least_squares(design, obs, w, 1e-12, options.max_condition);
    if (options.weighting == Weighting::Model) {
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd pred = design * fit.params;
            for (Eigen::Index k = 0; k < m; ++k) {
                const std::size_t i = used[static_cast<std::size_t>(k)];
                const double dof = static_cast<double>(curves.cov_dof[i]);
                const double vc = pred[3 * k] + curves.var_c[i] - obs[3 * k];
                const double vs = pred[3 * k + 1] + curves.var_s[i] - obs[3 * k + 1];
                const double cs = pred[3 * k + 2] + curves.cov_cs[i] - obs[3 * k + 2];
                if (vc > 0.0 && vs > 0.0) {
                    w[3 * k] = dof / (2.0 * vc * vc);
                    w[3 * k + 1] = dof / (2.0 * vs * vs);
                    w[3 * k + 2] = dof / (vc * vs + cs * cs);
                }
            }
            fit = weighted_least_squares(design, obs, w, 1e-12, options.max_condition);
        }
    }

    SecondMomentFit out;
    Mat10 pcov = fit.param_cov;
    if (options.weighting == Weighting::Uniform && fit.dof > 0) {
        pcov *= fit.chi2 / fit.dof;
    }
    const Mat10& map = cov10_basis_map();
    const Vec10 x = fit.params;
    if (options.design_basis == Basis::Sideband) {
        out.cov10_sb = x;
        out.param_cov_sb = pcov;
        out.cov10_sa = map * x;
        out.param_cov_sa = map * pcov * map.transpose();
    } else {
        out.cov10_sa = x;
        out.param_cov_sa = pcov;
        out.cov10_sb = map * x;
        out.param_cov_sb = map * pcov * map.transpose();
    }

    const Eigen::VectorXd resid = obs - design * fit.params;
    std::array<double, 3> chi2{};
    for (Eigen::Index k = 0; k < 3 * m; ++k) {
        chi2[static_cast<std::size_t>(k % 3)] += w[k] * resid[k] * resid[k];
    }
    const double per_curve_dof = static_cast<double>(m) - static_cast<double>(fit.rank) / 3.0;
    for (std::size_t c = 0; c < 3; ++c) {
        out.chi2_per_dof[c] = per_curve_dof > 0.0 ? chi2[c] / per_curve_dof : 0.0;
    }
    out.condition = fit.condition;
    out.sigma_min = fit.singular_values.size() > 0 ? fit.singular_values[fit.singular_values.size() - 1] : 0.0;
    out.rank = fit.rank;
    out.rank_deficient = fit.rank_deficient;

    Vec10 grad = Vec10::Zero();
    grad[cov10_index(0, 0)] = grad[cov10_index(1, 1)] = 1.0;
    grad[cov10_index(2, 2)] = grad[cov10_index(3, 3)] = -1.0;
    out.imbalance = grad.dot(out.cov10_sb);
    out.imbalance_se = std::sqrt(std::max(0.0, grad.dot(out.param_cov_sb * grad)));

    for (Basis b : {Basis::Sideband, Basis::SymAntisym}) {
        const Vec10 se = out.se(b);
        for (int k = 0; k < 4; ++k) {
            const int j = cov10_index(k, k);
            if (out.cov10(b)[j] < -3.0 * se[j]) {
                throw ModelMismatch("fitted variance " + std::to_string(k) + " in the " + std::string(basis_name(b)) +
                                    " basis is " + std::to_string(out.cov10(b)[j]) + ", more than 3 se below zero");
            }
        }
    }

    const Mat4 v = out.matrix(Basis::Sideband);
    out.min_symplectic_eigenvalue = symplectic_eigenvalues(v)[0];
    Eigen::SelfAdjointEigenSolver<Mat4> eig(v);
    out.admissible = eig.eigenvalues().minCoeff() >= 0.0 && out.min_symplectic_eigenvalue >= 1.0 - 1e-9;
    out.projected_sb = v;
    if (options.psd_projection) {
        const Vec4 lambda = eig.eigenvalues();
        const Vec4 clamped = lambda.cwiseMax(0.0);
        const Vec4 se = eigenvalue_se(eig.eigenvectors(), out.param_cov_sb);
        out.projected_sb = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
        out.psd_projected = true;
        for (int k = 0; k < 4; ++k) {
            if (clamped[k] - lambda[k] > se[k]) {
                out.psd_projection_flag = true;
            }
        }
    }
    return out;
}

FitResult fit_moments(const MomentCurves& curves, const Calibration& calib, double omega_ratio,
                      const FitOptions& options) {
    FitResult res;
    res.calibration = calib;
    res.omega_ratio = omega_ratio;
    res.first = fit_first_moments(curves, calib, omega_ratio, options);
    res.second = fit_second_moments(curves, calib, omega_ratio, options);
    if (!calib.converged) {
        res.warnings.push_back("DC calibration did not converge; using the last iterate");
    }
    if (res.first.rank_deficient) {
        res.warnings.push_back("first-moment design is rank deficient (condition " +
                               std::to_string(res.first.condition) + "); pseudo-inverse solution");
    }
    if (res.second.rank_deficient) {
        res.warnings.push_back("second-moment design is rank deficient (condition " +
                               std::to_string(res.second.condition) + "); pseudo-inverse solution");
    }
    if (!res.second.admissible) {
        res.warnings.push_back("fitted covariance violates the uncertainty relation (symplectic eigenvalue " +
                               std::to_string(res.second.min_symplectic_eigenvalue) + ")");
    }
    if (res.second.psd_projection_flag) {
        res.warnings.push_back("PSD projection moved an eigenvalue by more than its standard error");
    }
    return res;
}

IdentifiabilityReport identifiability_report(const ResonatorParams& params, std::span<const double> grid,
                                             double threshold) {
    params.validate();
    std::vector<Rows> rows;
    IdentifiabilityReport rep;
    for (double delta : grid) {
        if (auto r = normalized_rows(delta, params, Basis::Sideband)) {
            rows.push_back(*r);
        } else {
            ++rep.points_skipped;
        }
    }
    rep.points_used = rows.size();
    const auto m = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd second(3 * m, 10);
    Eigen::MatrixXd first(2 * m, 4);
    for (Eigen::Index k = 0; k < m; ++k) {
        const Rows& r = rows[static_cast<std::size_t>(k)];
        second.row(3 * k) = quadratic_row(r.a, r.a);
        second.row(3 * k + 1) = quadratic_row(r.b, r.b);
        second.row(3 * k + 2) = quadratic_row(r.a, r.b);
        first.row(2 * k) = r.a.transpose();
        first.row(2 * k + 1) = r.b.transpose();
    }
    const auto spectrum = [](const Eigen::MatrixXd& a) {
        Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
        if (sv.size() > 0 && sv[0] > 0.0) {
            sv /= sv[0];
        }
        return sv;
    };
    if (m > 0) {
        rep.second_singular_values = spectrum(second);
        rep.first_singular_values = spectrum(first);
    } else {
        rep.second_singular_values = Eigen::VectorXd::Zero(10);
        rep.first_singular_values = Eigen::VectorXd::Zero(4);
    }
    rep.second_rank = numerical_rank(rep.second_singular_values, threshold);
    rep.first_rank = numerical_rank(rep.first_singular_values, threshold);
    return rep;
}

}  // namespace rdtomo
