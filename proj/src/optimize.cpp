#include "sirhawkes/optimize.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace sirhawkes {

namespace {

constexpr double kHuge = std::numeric_limits<double>::infinity();

double checked(const Objective& f, const Eigen::VectorXd& x, int& evaluations) {
    ++evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : kHuge;
}

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    return x.cwiseMax(lower).cwiseMin(upper);
}

// Gradient with components pinned at an active bound (and pointing outward)
// removed.
Eigen::VectorXd projected_gradient(const Eigen::VectorXd& g, const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper) {
    Eigen::VectorXd pg = g;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if ((x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0)) pg[i] = 0.0;
    }
    return pg;
}

}  // namespace

Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double fx, const Eigen::VectorXd& lower,
                                 const Eigen::VectorXd& upper, double step, int& evaluations) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(x[i]));
        const double up = std::min(x[i] + h, upper[i]);
        const double down = std::max(x[i] - h, lower[i]);
        probe[i] = up;
        const double f_up = checked(f, probe, evaluations);
        probe[i] = down;
        const double f_down = checked(f, probe, evaluations);
        probe[i] = x[i];
        const bool ok_up = std::isfinite(f_up) && up > x[i];
        const bool ok_down = std::isfinite(f_down) && down < x[i];
        if (ok_up && ok_down) {
            g[i] = (f_up - f_down) / (up - down);
        } else if (ok_up && std::isfinite(fx)) {
            g[i] = (f_up - fx) / (up - x[i]);
        } else if (ok_down && std::isfinite(fx)) {
            g[i] = (fx - f_down) / (x[i] - down);
        } else {
            g[i] = 0.0;
        }
    }
    return g;
}

OptimizerResult minimize_box(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, const OptimizerOptions& options) {
    const Eigen::Index n = x0.size();
    OptimizerResult result;
    result.x = project(x0, lower, upper);
    result.value = checked(f, result.x, result.evaluations);
    if (n == 0 || !std::isfinite(result.value)) {
        result.converged = n == 0 && std::isfinite(result.value);
        return result;
    }

    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd g =
        numeric_gradient(f, result.x, result.value, lower, upper, options.fd_step, result.evaluations);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        result.iterations = iter + 1;
        const Eigen::VectorXd pg = projected_gradient(g, result.x, lower, upper);
        if (pg.norm() < options.grad_tol) {
            result.converged = true;
            break;
        }
        Eigen::VectorXd direction = -inv_hessian * pg;
        if (direction.dot(pg) >= 0.0) {
            inv_hessian.setIdentity();
            direction = -pg;
        }
        // Cap the step in transformed coordinates to keep exp() finite.
        const double longest = direction.cwiseAbs().maxCoeff();
        if (longest > 5.0) direction *= 5.0 / longest;

        double step = 1.0;
        Eigen::VectorXd candidate;
        double value = kHuge;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            candidate = project(result.x + step * direction, lower, upper);
            value = checked(f, candidate, result.evaluations);
            const double decrease = pg.dot(candidate - result.x);
            if (value <= result.value + 1e-4 * decrease) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (inv_hessian.isIdentity()) {
                // Steepest descent failed too: at numerical resolution.
                result.converged = pg.norm() < 1e3 * options.grad_tol;
                break;
            }
            inv_hessian.setIdentity();
            continue;
        }

        const double previous = result.value;
        const Eigen::VectorXd s = candidate - result.x;
        result.x = candidate;
        result.value = value;
        const Eigen::VectorXd g_new =
            numeric_gradient(f, result.x, result.value, lower, upper, options.fd_step, result.evaluations);
        const Eigen::VectorXd y = g_new - g;
        g = g_new;

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            inv_hessian = (I - rho * s * y.transpose()) * inv_hessian * (I - rho * y * s.transpose()) +
                          rho * s * s.transpose();
        }

        if (std::abs(previous - value) <= options.rel_tol * std::max(1.0, std::abs(value))) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace sirhawkes
