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

// Two-mode Gaussian states of the sideband pair.
//
// Quadratures follow [p, q] = 2i, so the vacuum covariance is the identity.
// Component order is (p+, q+, p-, q-) in the sideband basis and
// (p_s, q_s, p_a, q_a) in the symmetric/antisymmetric basis.

#include <array>
#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace rdtomo {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

enum class Basis { Sideband, SymAntisym };

std::string_view basis_name(Basis b);
Basis parse_basis(std::string_view name);

/// Orthogonal, symmetric and involutive map between the two bases.
const Mat4& basis_matrix();

/// Symplectic form in the (p1, q1, p2, q2) ordering.
const Mat4& symplectic_form();

/// Sorted symplectic eigenvalues (each appears once).
std::array<double, 2> symplectic_eigenvalues(const Mat4& cov);

class TwoModeGaussian {
  public:
    /// Validates symmetry, positivity and the uncertainty relation.
    /// Throws InadmissibleState carrying the offending symplectic eigenvalue.
    TwoModeGaussian(const Vec4& mean, const Mat4& cov, Basis basis = Basis::Sideband);

    static TwoModeGaussian vacuum();
    static TwoModeGaussian coherent(const Vec4& mean, Basis basis = Basis::Sideband);
    static TwoModeGaussian thermal(double n_excess);

    const Vec4& mean() const { return mean_; }
    const Mat4& cov() const { return cov_; }
    Basis basis() const { return basis_; }

    TwoModeGaussian in_basis(Basis target) const;

  private:
    struct Unchecked {};
    TwoModeGaussian(Unchecked, const Vec4& mean, const Mat4& cov, Basis basis)
        : mean_(mean), cov_(cov), basis_(basis) {}

    friend TwoModeGaussian basis_change(const TwoModeGaussian& state);

    Vec4 mean_;
    Mat4 cov_;
    Basis basis_;
};

/// Toggles between the sideband and S/A representations.
TwoModeGaussian basis_change(const TwoModeGaussian& state);

/// Coherent drive of both sidebands by an electro-optic phase modulator.
struct PhaseModSpec {
    double s = 0.0;         // displacement magnitude in vacuum standard deviations
    double phi = 0.0;       // modulation phase
    double excess_p = 0.0;  // classical noise added to p+ and q-
    double excess_q = 0.0;  // classical noise added to q+ and p-

    void validate() const;
};

/// Sideband-basis state with <q_s> = s cos(phi), <p_a> = s sin(phi), <p_s> = <q_a> = 0.
TwoModeGaussian phase_modulated_state(const PhaseModSpec& spec);

/// Complex displacement amplitudes (alpha+, alpha-) with alpha = (<p> + i <q>) / 2.
std::array<std::complex<double>, 2> displacement_amplitudes(const TwoModeGaussian& state);

struct SemiclassicalMeans {
    std::complex<double> amplitude;  // <P> = <p_s> + i <q_a>
    std::complex<double> phase;      // <Q> = <q_s> - i <p_a>
};

SemiclassicalMeans semiclassical_means(const TwoModeGaussian& state);

}  // namespace rdtomo
