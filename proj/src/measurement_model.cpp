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

#include "rdtomo/measurement_model.hpp"

#include <algorithm>
#include <cmath>

#include "rdtomo/errors.hpp"

namespace rdtomo {

namespace {

// Quadrature rows contributed by one field mode entering J_Omega with
// weight Gamma. Upper-sideband modes enter through conj(Gamma) a, lower ones
// through Gamma a^dagger; both give Re/Im Gamma on the cosine row.
Mat2 upper_rows(Complex g) {
    Mat2 b;
    b << g.real(), g.imag(),
        -g.imag(), g.real();
    return b;
}

Mat2 lower_rows(Complex g) {
    Mat2 b;
    b << g.real(), g.imag(),
        g.imag(), -g.real();
    return b;
}

}  // namespace

Mat24 CoefficientSet::matrix() const {
    Mat24 c;
    c.row(0) = c_cos.transpose();
    c.row(1) = c_sin.transpose();
    return c;
}

CoefficientSet coefficients(double delta, const ResonatorParams& params) {
    params.validate();
    const double f2 = params.f2;
    const double w = params.omega_ratio;
    const Complex r0 = reflection(delta, params.d);
    const Complex u_up = r0 * std::conj(reflection(delta + w, params.d));
    const Complex u_lo = r0 * std::conj(reflection(delta - w, params.d));
    const Complex g_up = (1.0 - f2) * u_up + f2;
    const Complex g_lo = (1.0 - f2) * u_lo + f2;

    CoefficientSet cs;
    cs.delta = delta;
    const Mat2 up = upper_rows(g_up);
    const Mat2 lo = lower_rows(g_lo);
    cs.c_cos << up(0, 0), up(0, 1), lo(0, 0), lo(0, 1);
    cs.c_sin << up(1, 0), up(1, 1), lo(1, 0), lo(1, 1);
    cs.sql = (1.0 - f2) * std::norm(r0) + f2;

    // Vacuum inputs: the uncoupled spatial mode c at both sidebands, and the
    // modes leaking back through the cavity at both sidebands.
    const double mix = std::sqrt(f2 * (1.0 - f2));
    const double leak = std::sqrt(1.0 - f2) * std::abs(r0);
    const Mat2 modes[] = {
        upper_rows(mix * (1.0 - u_up)),
        lower_rows(mix * (1.0 - u_lo)),
        upper_rows(Complex(leak * std::sqrt(transmission_T(delta + w, params.d)), 0.0)),
        lower_rows(Complex(leak * std::sqrt(transmission_T(delta - w, params.d)), 0.0)),
    };
    for (const Mat2& b : modes) {
        cs.vac_cov += b * b.transpose();
    }
    return cs;
}

Mat24 coefficients_sa(const CoefficientSet& cs) {
    return cs.matrix() * basis_matrix().transpose();
}

PredictedMoments predict_moments(const TwoModeGaussian& state, const CoefficientSet& cs, bool normalized) {
    const TwoModeGaussian sb = state.in_basis(Basis::Sideband);
    const Mat24 c = cs.matrix();
    PredictedMoments pm;
    pm.delta = cs.delta;
    pm.sql = cs.sql;
    pm.mean2 = c * sb.mean();
    pm.cov2 = c * sb.cov() * c.transpose() + cs.vac_cov;
    if (normalized) {
        if (!(cs.sql > 0.0)) {
            throw DomainError("reflected LO power vanishes; normalized moments are undefined");
        }
        const double scale = 2.0 * cs.sql;
        pm.mean2 /= std::sqrt(scale);
        pm.cov2 /= scale;
    }
    pm.cov2 = 0.5 * (pm.cov2 + pm.cov2.transpose());
    return pm;
}

PredictedMoments predict_moments(const TwoModeGaussian& state, double delta, const ResonatorParams& params,
                                 bool normalized) {
    return predict_moments(state, coefficients(delta, params), normalized);
}

Projection theta_projection(const PredictedMoments& moments, double theta) {
    const Vec2 u(std::cos(theta), std::sin(theta));
    return {u.dot(moments.mean2), u.dot(moments.cov2 * u)};
}

Projection general_quadrature(double varphi, double phi, double theta, const TwoModeGaussian& state) {
    const TwoModeGaussian sb = state.in_basis(Basis::Sideband);
    const Vec4 u(std::cos(theta) * std::cos(varphi), std::cos(theta) * std::sin(varphi),
                 std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi));
    return {u.dot(sb.mean()), u.dot(sb.cov() * u)};
}

ModalMixing modal_mixing_angle(double delta, const ResonatorParams& params) {
    params.validate();
    const double shifted = delta + params.omega_ratio;
    const double kept = 1.0 - transmission_T(shifted, params.d);
    return {std::acos(std::sqrt(std::clamp(kept, 0.0, 1.0))), phase_psi(shifted, params.d).value};
}

}  // namespace rdtomo
