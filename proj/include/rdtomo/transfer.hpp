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

// Reflection transfer functions of a high-finesse detection resonator.
//
// Detunings are dimensionless, measured in units of the cavity half
// bandwidth. The carrier (LO) sits at `delta`; the upper and lower
// sidebands sit at `delta + omega_ratio` and `delta - omega_ratio`.

#include <complex>
#include <span>
#include <vector>

namespace rdtomo {

using Complex = std::complex<double>;

struct ResonatorParams {
    double d = 0.05;           // intensity reflectance at exact resonance
    double omega_ratio = 2.9;  // sideband offset in half-bandwidth units
    double f2 = 0.15;          // power fraction in the uncoupled spatial mode

    /// Throws DomainError unless 0 <= d <= 1, 0 <= f2 < 1 and omega_ratio > 0.
    void validate() const;
};

enum class Sideband { Upper, Lower };

inline double sideband_sign(Sideband s) { return s == Sideband::Upper ? 1.0 : -1.0; }

/// r(delta) = -(sqrt(d) + i delta) / (1 - i delta).
Complex reflection(double delta, double d);

/// Fraction of power lost into the cavity, (1 - d) / (1 + delta^2).
double transmission_T(double delta, double d);

struct PhaseSample {
    double value = 0.0;
    // Set where r vanishes (d = 0, delta = 0) and the value is a one-sided limit.
    bool singular = false;
};

/// Continuous argument of reflection().
///
/// The branch is anchored at delta = +inf where the phase is 0 and followed
/// continuously toward negative detuning, so the range is (-2 pi, 0]. At the
/// singular point d = 0, delta = 0 the limit from delta -> 0+ is returned.
PhaseSample phase_psi(double delta, double d);

std::vector<PhaseSample> phase_psi_curve(std::span<const double> grid, double d);

/// R(delta) = exp(i Psi(delta)) * conj(r(delta +/- omega_ratio)).
Complex sideband_coeff(double delta, Sideband s, const ResonatorParams& params);

/// Mode-mismatch corrected coefficient G = (1 - f2) |r(delta)| R(delta) + f2.
///
/// Evaluated as (1 - f2) r(delta) conj(r(delta +/- omega)) + f2, which stays
/// well defined where the phase of r is not.
Complex effective_coeff(double delta, Sideband s, const ResonatorParams& params);

/// Reflected LO power relative to the far-detuned value: (1 - f2) |r|^2 + f2.
double sql_level(double delta, const ResonatorParams& params);

}  // namespace rdtomo
