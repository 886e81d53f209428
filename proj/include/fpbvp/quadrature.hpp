#pragma once

#include <functional>

namespace fpbvp::quadrature {

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_subdivisions = 4000;
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int subdivisions = 0;
    bool converged = false;
};

/// Globally adaptive Gauss-Kronrod 15(7) on [a, b]; bisects the segment with
/// the largest error estimate. Intended for smooth-after-substitution
/// integrands; endpoint singularities should be substituted away by callers.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadratureSpec& spec = {});

}  // namespace fpbvp::quadrature
