#pragma once

#include <Eigen/Core>

#include <functional>

namespace sirhawkes {

struct OptimizerOptions {
    double rel_tol = 1e-8;   // relative change of the objective
    double grad_tol = 1e-6;  // norm of the projected gradient
    int max_iterations = 1000;
    double fd_step = 1e-5;   // central-difference step, relative to max(1, |x_i|)
};

struct OptimizerResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

// Central-difference gradient; falls back to a one-sided difference when one
// neighbour is non-finite and to 0 when both are.
[[nodiscard]] Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double fx,
                                               const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                               double step, int& evaluations);

/// Box-constrained quasi-Newton minimization: BFGS inverse-Hessian updates,
/// finite-difference gradients and Armijo backtracking along the projected
/// path. Non-finite objective values are treated as +inf. Every iterate lies
/// inside [lower, upper].
[[nodiscard]] OptimizerResult minimize_box(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                                           const Eigen::VectorXd& upper, const OptimizerOptions& options = {});

}  // namespace sirhawkes
