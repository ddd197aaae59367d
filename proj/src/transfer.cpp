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

#include "rdtomo/transfer.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rdtomo/errors.hpp"

namespace rdtomo {

namespace {

void check_inputs(double delta, double d) {
    if (!std::isfinite(delta)) {
        throw DomainError("detuning must be finite");
    }
    if (!(d >= 0.0 && d <= 1.0)) {
        throw DomainError("impedance matching parameter d must lie in [0, 1], got " + std::to_string(d));
    }
}

}  // namespace

void ResonatorParams::validate() const {
    if (!(d >= 0.0 && d <= 1.0)) {
        throw DomainError("d must lie in [0, 1], got " + std::to_string(d));
    }
    if (!(f2 >= 0.0 && f2 < 1.0)) {
        throw DomainError("f2 must lie in [0, 1), got " + std::to_string(f2));
    }
    if (!(omega_ratio > 0.0) || !std::isfinite(omega_ratio)) {
        throw DomainError("omega_ratio must be positive and finite, got " + std::to_string(omega_ratio));
    }
}

Complex reflection(double delta, double d) {
    check_inputs(delta, d);
    return -Complex(std::sqrt(d), delta) / Complex(1.0, -delta);
}

double transmission_T(double delta, double d) {
    check_inputs(delta, d);
    return (1.0 - d) / (1.0 + delta * delta);
}

PhaseSample phase_psi(double delta, double d) {
    check_inputs(delta, d);
    constexpr double pi = std::numbers::pi;
    if (delta == 0.0) {
        if (d == 0.0) {
            return {-pi / 2.0, true};
        }
        return {-pi, false};
    }
    // r = [(delta^2 - sqrt d) - i delta (1 + sqrt d)] / (1 + delta^2); the
    // positive denominator does not change the argument.
    const double sd = std::sqrt(d);
    const double re = delta * delta - sd;
    const double im = -delta * (1.0 + sd);
    const double principal = std::atan2(im, re);
    return {delta > 0.0 ? principal : principal - 2.0 * pi, false};
}

std::vector<PhaseSample> phase_psi_curve(std::span<const double> grid, double d) {
    std::vector<PhaseSample> out;
    out.reserve(grid.size());
    for (double delta : grid) {
        out.push_back(phase_psi(delta, d));
    }
    return out;
}

Complex sideband_coeff(double delta, Sideband s, const ResonatorParams& params) {
    params.validate();
    const double psi = phase_psi(delta, params.d).value;
    const Complex shifted = reflection(delta + sideband_sign(s) * params.omega_ratio, params.d);
    return std::polar(1.0, psi) * std::conj(shifted);
}

Complex effective_coeff(double delta, Sideband s, const ResonatorParams& params) {
    params.validate();
    const Complex carrier = reflection(delta, params.d);
    const Complex shifted = reflection(delta + sideband_sign(s) * params.omega_ratio, params.d);
    return (1.0 - params.f2) * carrier * std::conj(shifted) + params.f2;
}

double sql_level(double delta, const ResonatorParams& params) {
    params.validate();
    return (1.0 - params.f2) * std::norm(reflection(delta, params.d)) + params.f2;
}

}  // namespace rdtomo
