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

#include "rdtomo/gaussian_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rdtomo/errors.hpp"

namespace rdtomo {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kHeisenbergTol = 1e-9;

Mat4 make_basis_matrix() {
    const double h = 1.0 / std::numbers::sqrt2;
    Mat4 m;
    // rows: p_s, q_s, p_a, q_a; columns: p+, q+, p-, q-
    m << h, 0, h, 0,
         0, h, 0, h,
         h, 0, -h, 0,
         0, h, 0, -h;
    return m;
}

Mat4 make_symplectic_form() {
    Mat4 w = Mat4::Zero();
    w(0, 1) = 1.0;
    w(1, 0) = -1.0;
    w(2, 3) = 1.0;
    w(3, 2) = -1.0;
    return w;
}

void validate(const Vec4& mean, const Mat4& cov) {
    if (!mean.allFinite() || !cov.allFinite()) {
        throw InadmissibleState("state moments must be finite", std::numeric_limits<double>::quiet_NaN());
    }
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        throw InadmissibleState("covariance matrix is not symmetric", std::numeric_limits<double>::quiet_NaN());
    }
    const auto nu = symplectic_eigenvalues(cov);
    Eigen::SelfAdjointEigenSolver<Mat4> eig(0.5 * (cov + cov.transpose()), Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kSymmetryTol * scale || nu[0] < 1.0 - kHeisenbergTol) {
        std::ostringstream msg;
        msg << "covariance violates the uncertainty relation: smallest symplectic eigenvalue " << nu[0]
            << " < 1";
        throw InadmissibleState(msg.str(), nu[0]);
    }
}

}  // namespace

std::string_view basis_name(Basis b) {
    return b == Basis::Sideband ? "sideband" : "sa";
}

Basis parse_basis(std::string_view name) {
    if (name == "sideband") {
        return Basis::Sideband;
    }
    if (name == "sa") {
        return Basis::SymAntisym;
    }
    throw std::invalid_argument("unknown basis '" + std::string(name) + "' (expected sideband or sa)");
}

const Mat4& basis_matrix() {
    static const Mat4 m = make_basis_matrix();
    return m;
}

const Mat4& symplectic_form() {
    static const Mat4 w = make_symplectic_form();
    return w;
}

std::array<double, 2> symplectic_eigenvalues(const Mat4& cov) {
    // Eigenvalues of W V come in pairs +/- i nu for positive definite V.
    Eigen::EigenSolver<Mat4> eig(symplectic_form() * cov, false);
    std::array<double, 4> mags{};
    for (int i = 0; i < 4; ++i) {
        mags[i] = std::abs(eig.eigenvalues()[i]);
    }
    std::sort(mags.begin(), mags.end());
    return {0.5 * (mags[0] + mags[1]), 0.5 * (mags[2] + mags[3])};
}

TwoModeGaussian::TwoModeGaussian(const Vec4& mean, const Mat4& cov, Basis basis)
    : mean_(mean), cov_(cov), basis_(basis) {
    validate(mean_, cov_);
}

TwoModeGaussian TwoModeGaussian::vacuum() {
    return TwoModeGaussian(Vec4::Zero(), Mat4::Identity());
}

TwoModeGaussian TwoModeGaussian::coherent(const Vec4& mean, Basis basis) {
    return TwoModeGaussian(mean, Mat4::Identity(), basis);
}

TwoModeGaussian TwoModeGaussian::thermal(double n_excess) {
    if (!(n_excess >= 0.0)) {
        throw InadmissibleState("thermal excess must be non-negative", 1.0 + n_excess);
    }
    return TwoModeGaussian(Vec4::Zero(), (1.0 + n_excess) * Mat4::Identity());
}

TwoModeGaussian TwoModeGaussian::in_basis(Basis target) const {
    return target == basis_ ? *this : basis_change(*this);
}

TwoModeGaussian basis_change(const TwoModeGaussian& state) {
    const Mat4& m = basis_matrix();
    const Basis other = state.basis() == Basis::Sideband ? Basis::SymAntisym : Basis::Sideband;
    Mat4 cov = m * state.cov() * m.transpose();
    cov = 0.5 * (cov + cov.transpose());
    return TwoModeGaussian(TwoModeGaussian::Unchecked{}, m * state.mean(), cov, other);
}

void PhaseModSpec::validate() const {
    if (!(s >= 0.0) || !std::isfinite(s)) {
        throw std::invalid_argument("displacement s must be finite and non-negative");
    }
    if (!std::isfinite(phi)) {
        throw std::invalid_argument("modulation phase must be finite");
    }
    if (!(excess_p >= 0.0) || !(excess_q >= 0.0)) {
        throw std::invalid_argument("excess noise variances must be non-negative");
    }
}

TwoModeGaussian phase_modulated_state(const PhaseModSpec& spec) {
    spec.validate();
    const double a = spec.s / std::numbers::sqrt2;
    const double sp = a * std::sin(spec.phi);
    const double cq = a * std::cos(spec.phi);
    Vec4 mean(sp, cq, -sp, cq);
    Vec4 diag(spec.excess_p, spec.excess_q, spec.excess_q, spec.excess_p);
    Mat4 cov = Mat4::Identity();
    cov.diagonal() += diag;
    return TwoModeGaussian(mean, cov, Basis::Sideband);
}

std::array<std::complex<double>, 2> displacement_amplitudes(const TwoModeGaussian& state) {
    const Vec4 m = state.in_basis(Basis::Sideband).mean();
    return {std::complex<double>(m[0], m[1]) / 2.0, std::complex<double>(m[2], m[3]) / 2.0};
}

SemiclassicalMeans semiclassical_means(const TwoModeGaussian& state) {
    const Vec4 m = state.in_basis(Basis::SymAntisym).mean();
    return {{m[0], m[3]}, {m[1], -m[2]}};
}

}  // namespace rdtomo
