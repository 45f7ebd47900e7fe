#pragma once

#include <functional>

namespace sirhawkes {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

// Adaptive 15-point Gauss-Kronrod quadrature of f over [a, b] with global
// absolute tolerance abs_tol. b may be +infinity, in which case the tail is
// mapped onto a finite interval with t = a + x / (1 - x).
[[nodiscard]] QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                                         double abs_tol = 1e-10, int max_intervals = 4000);

}  // namespace sirhawkes
