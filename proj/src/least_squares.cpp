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

#include "rdtomo/least_squares.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rdtomo {

LinearFit weighted_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& obs,
                                 const Eigen::VectorXd& weights, double rank_rtol, double max_condition) {
    if (design.rows() != obs.size() || design.rows() != weights.size()) {
        throw std::invalid_argument("design, observations and weights disagree in length");
    }
    if (design.rows() < design.cols()) {
        throw std::invalid_argument("fewer observations than parameters");
    }
    if ((weights.array() < 0.0).any() || !weights.allFinite()) {
        throw std::invalid_argument("weights must be finite and non-negative");
    }
    const Eigen::VectorXd sw = weights.cwiseSqrt();
    const Eigen::MatrixXd a = sw.asDiagonal() * design;
    const Eigen::VectorXd y = sw.cwiseProduct(obs);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    const double cutoff = std::max(rank_rtol, 1.0 / max_condition) * smax;

    LinearFit fit;
    fit.singular_values = sv;
    fit.rank = 0;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] > cutoff && sv[i] > 0.0) {
            inv[i] = 1.0 / sv[i];
            ++fit.rank;
        }
    }
    const double smin = sv.size() > 0 ? sv[sv.size() - 1] : 0.0;
    fit.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    fit.rank_deficient = fit.condition > max_condition;

    const Eigen::MatrixXd& v = svd.matrixV();
    fit.params = v * inv.asDiagonal() * (svd.matrixU().transpose() * y);
    fit.param_cov = v * inv.cwiseAbs2().asDiagonal() * v.transpose();
    const Eigen::VectorXd resid = y - a * fit.params;
    fit.chi2 = resid.squaredNorm();
    fit.dof = static_cast<int>(design.rows()) - fit.rank;
    return fit;
}

int numerical_rank(const Eigen::VectorXd& singular_values, double rtol) {
    if (singular_values.size() == 0 || !(singular_values.maxCoeff() > 0.0)) {
        return 0;
    }
    const double smax = singular_values.maxCoeff();
    int rank = 0;
    for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
        if (singular_values[i] / smax > rtol) {
            ++rank;
        }
    }
    return rank;
}

LmResult levenberg_marquardt(const LmProblem& problem, Eigen::VectorXd start, const LmOptions& options) {
    if (problem.project) {
        problem.project(start);
    }
    Eigen::VectorXd x = std::move(start);
    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    problem.evaluate(x, r, jac);
    double cost = 0.5 * r.squaredNorm();
    double lambda = options.initial_lambda;

    LmResult result;
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        result.iterations = iter;
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * r;
        const Eigen::VectorXd scale = jtj.diagonal().cwiseMax(1e-12 * std::max(1.0, jtj.diagonal().maxCoeff()));

        bool accepted = false;
        Eigen::VectorXd step;
        while (!accepted && lambda < 1e16) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal() += lambda * scale;
            step = -damped.ldlt().solve(grad);
            Eigen::VectorXd trial = x + step;
            if (problem.project) {
                problem.project(trial);
            }
            step = trial - x;
            Eigen::VectorXd r_trial;
            Eigen::MatrixXd j_trial;
            problem.evaluate(trial, r_trial, j_trial);
            const double trial_cost = 0.5 * r_trial.squaredNorm();
            if (std::isfinite(trial_cost) && trial_cost <= cost) {
                x = std::move(trial);
                r = std::move(r_trial);
                jac = std::move(j_trial);
                cost = trial_cost;
                lambda = std::max(lambda / 10.0, 1e-15);
                accepted = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted) {
            // No descent direction left at any damping: x is stationary.
            result.converged = true;
            break;
        }
        if (step.norm() <= options.step_rtol * (x.norm() + options.step_rtol)) {
            result.converged = true;
            break;
        }
    }
    result.params = x;
    result.cost = cost;
    return result;
}

}  // namespace rdtomo
