#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fpbvp/problem.hpp"
#include "fpbvp/quadrature.hpp"
#include "fpbvp/splines.hpp"

namespace fpbvp::oracle {

/// (I_a^t)^mu y via adaptive quadrature with the substitution u = (t-s)^mu
/// that removes the kernel endpoint singularity. If lower_singular_exp = g
/// is in (0, 1), an additional algebraic singularity y ~ s^{g-1} at s = a- is
/// handled by splitting and substituting on the lower half.
double quad_frac_integral(const std::function<double(double)>& y, double mu, double a, double t,
                          const quadrature::QuadratureSpec& spec = {},
                          double lower_singular_exp = 0.0);

/// Closed-form solution of the perturbed IVP with monomial forcing t^k:
///   x(t) = x0/Gamma(gamma) t^{gamma-1} + Gamma(k+1)/Gamma(alpha+k+1) t^{alpha+k}
///          + nu t^alpha / Gamma(alpha+1),
///   nu = -Gamma(zeta+1) Gamma(k+1) / Gamma(zeta+k+1) T^k.
struct LinearClosedForm {
    double alpha, beta_type, k, x0_tilde, horizon;

    double gamma_exp() const { return alpha + beta_type - alpha * beta_type; }
    double zeta() const { return 1.0 - gamma_exp() + alpha; }
    double nu() const;
    double operator()(double t) const;

    /// eps-shifted analog (both integrals start at eps), closed form via the
    /// right-local monomial integrals.
    double eps_shifted(double eps, double t) const;
};

double linear_closed_form(double alpha, double beta_type, double k, double x0_tilde,
                          double horizon, double t);

/// Dense-grid Picard solution of the eps-shifted integral equation using
/// quadrature-based F_eps; independent of the spline machinery. Used as the
/// error reference for problems without a closed form.
struct ReferenceSolution {
    std::vector<double> grid;                // ascending, grid.front() = eps
    std::vector<Vec> weighted;               // w(t_j) per grid point
    double gamma_exp = 1.0;
    bool converged = false;
    int iterations = 0;

    Vec weighted_at(double t) const;  // linear interpolation of w
    Vec at(double t) const;           // t^{gamma-1} w(t)
};

ReferenceSolution reference_solution_eps(const ProblemSpec& problem, double eps,
                                         std::size_t dense_grid_size, double tol = 1e-12,
                                         int max_iter = 200);

struct HilferResidualStats {
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
    double max_abs = 0.0;
    double mean_abs = 0.0;
};

/// Validation-only residual |D^{alpha,beta} x(t) - f(t, x(t)) - nu| at the
/// samples: inner fractional integral in closed form from the spline,
/// d/dt by Richardson central differences, outer integral by quadrature.
/// Samples too close to a knot boundary or to eps are skipped.
HilferResidualStats hilfer_residual(const WeightedSpline& x, const ProblemSpec& problem,
                                    const Vec& nu, std::span<const double> t_samples);

}  // namespace fpbvp::oracle
