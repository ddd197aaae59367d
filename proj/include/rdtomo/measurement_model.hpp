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

// Linear measurement model of the demodulated photocurrent components.
//
// At detuning delta the cosine and sine components are
//
//   J_cos = c_cos . x + w_cos,   J_sin = c_sin . x + w_sin,
//
// with x = (p+, q+, p-, q-) and (w_cos, w_sin) independent vacuum noise. The
// raw scale is such that a vacuum input gives Var(J_cos) = Var(J_sin) =
// 2 * sql(delta); the normalized scale divides by that value.

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rdtomo/gaussian_state.hpp"
#include "rdtomo/transfer.hpp"

namespace rdtomo {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Mat24 = Eigen::Matrix<double, 2, 4>;

struct CoefficientSet {
    double delta = 0.0;
    Vec4 c_cos = Vec4::Zero();  // (x+, y+, x-, y-)
    Vec4 c_sin = Vec4::Zero();  // (-y+, x+, y-, -x-)
    Mat2 vac_cov = Mat2::Zero();
    double sql = 1.0;

    /// Rows c_cos and c_sin stacked.
    Mat24 matrix() const;
};

CoefficientSet coefficients(double delta, const ResonatorParams& params);

/// Coefficients expressed on (p_s, q_s, p_a, q_a).
Mat24 coefficients_sa(const CoefficientSet& cs);

struct PredictedMoments {
    double delta = 0.0;
    Vec2 mean2 = Vec2::Zero();
    Mat2 cov2 = Mat2::Zero();
    double sql = 1.0;
};

/// Mean and covariance of (J_cos, J_sin) for a Gaussian input.
///
/// Normalized output divides the mean by sqrt(2 sql) and the covariance by
/// 2 sql; throws DomainError where the reflected LO vanishes.
PredictedMoments predict_moments(const TwoModeGaussian& state, double delta, const ResonatorParams& params,
                                 bool normalized);

PredictedMoments predict_moments(const TwoModeGaussian& state, const CoefficientSet& cs, bool normalized);

struct Projection {
    double mean = 0.0;
    double variance = 0.0;
};

/// Statistics of J_theta = cos(theta) J_cos + sin(theta) J_sin.
Projection theta_projection(const PredictedMoments& moments, double theta);

/// Statistics of cos(theta) X+(varphi) + sin(theta) X-(phi), with
/// X(angle) = cos(angle) p + sin(angle) q, computed directly from the state.
Projection general_quadrature(double varphi, double phi, double theta, const TwoModeGaussian& state);

struct ModalMixing {
    double xi = 0.0;         // arccos sqrt(1 - T(delta + omega)), in [0, pi/2]
    double rotation = 0.0;   // phase-space rotation Psi(delta + omega) of the upper sideband
};

ModalMixing modal_mixing_angle(double delta, const ResonatorParams& params);

}  // namespace rdtomo
