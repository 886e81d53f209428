#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fpbvp/constants.hpp"
#include "fpbvp/fracops.hpp"
#include "fpbvp/problem.hpp"

namespace fpbvp {

/// Thrown when the Picard loop hits max_iter above tolerance.
struct NonConvergence : std::runtime_error {
    double last_delta;
    double last_ratio;
    NonConvergence(double delta, double ratio);
};

struct SolveResult {
    WeightedSpline solution;
    int iterations = 0;
    Vec delta_T;            // the boundary-enforcing perturbation nu
    Vec boundary_residual;  // |I_eps^{1-gamma} x(T) - x0_tilde|
    Vec apriori_bound;      // Q^m (I-Q)^{-1} Xi m, empty if unavailable
    std::vector<double> history;  // weighted sup deltas per iteration
    double wall_time_s = 0.0;
    std::vector<std::string> warnings;
    std::optional<AssumptionReport> assumptions;
};

/// x_0: weighted part identically x0_tilde / Gamma(gamma).
WeightedSpline initial_iterate(const ProblemSpec& problem, const KnotCollection& knots, int q);

/// x_{m+1} = x_0 + S F_eps f(., x_m). i_T_out, if given, receives the zeta
/// integral of the fitted integrand (determines Delta_T for this iterate).
WeightedSpline iterate_once(const ProblemSpec& problem, const SolverConfig& cfg,
                            const KnotCollection& knots, const WeightedSpline& x_m,
                            Vec* i_T_out = nullptr);

/// Picard loop on the perturbed IVP until the weighted sup distance over all
/// Bernstein nodes drops below cfg.tol. Deterministic: identical inputs give
/// bit-identical results (wall_time_s aside).
SolveResult solve_perturbed_ivp(const ProblemSpec& problem, const SolverConfig& cfg);

/// Delta_T(x0_tilde) = -Gamma(zeta+1) T^{-zeta} I_eps^T^zeta f(., x(.))(T),
/// computed from a fresh fit of the integrand along the supplied iterate.
Vec delta_T(const ProblemSpec& problem, const SolverConfig& cfg, const WeightedSpline& x);

/// |I_eps^{1-gamma} x (T) - x0_tilde| in closed form (|x(T) - x0_tilde| for
/// gamma = 1, where the order-zero integral is the identity).
Vec boundary_residual(const ProblemSpec& problem, const SolverConfig& cfg,
                      const WeightedSpline& x);

// Result serialization used by the CLI.
std::string solve_diagnostics_json(const SolveResult& r);
void solution_to_csv(const SolveResult& r, const ProblemSpec& problem, std::size_t grid_points,
                     std::ostream& os);

}  // namespace fpbvp
