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

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace rdtomo {

struct LinearFit {
    Eigen::VectorXd params;
    Eigen::MatrixXd param_cov;   // (A^T W A)^+ in observation units
    Eigen::VectorXd singular_values;  // of the weighted design, descending
    double condition = 0.0;
    double chi2 = 0.0;
    int dof = 0;
    int rank = 0;
    bool rank_deficient = false;
};

/// Weighted linear least squares min sum_i w_i (y_i - A_i x)^2 via SVD.
///
/// Directions whose singular value falls below `rank_rtol` times the
/// largest are dropped (pseudo-inverse), and the fit is flagged as rank
/// deficient when the condition number exceeds `max_condition`.
LinearFit weighted_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& obs,
                                 const Eigen::VectorXd& weights, double rank_rtol = 1e-12,
                                 double max_condition = 1e8);

/// Numerical rank at threshold sigma_i / sigma_max > rtol.
int numerical_rank(const Eigen::VectorXd& singular_values, double rtol);

struct LmProblem {
    // Fills residuals and the Jacobian d(residual)/d(param) for the given parameters.
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd&)> evaluate;
    // Maps a trial point back into the feasible box.
    std::function<void(Eigen::VectorXd&)> project;
};

struct LmOptions {
    int max_iterations = 200;
    double step_rtol = 1e-9;
    double initial_lambda = 1e-3;
};

struct LmResult {
    Eigen::VectorXd params;
    double cost = 0.0;  // half the residual sum of squares
    int iterations = 0;
    bool converged = false;
};

/// Damped Gauss-Newton (Levenberg-Marquardt with Marquardt scaling).
LmResult levenberg_marquardt(const LmProblem& problem, Eigen::VectorXd start, const LmOptions& options = {});

}  // namespace rdtomo
