#include "fpbvp/solver.hpp"

#include <chrono>
#include <limits>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "fpbvp/specfun.hpp"

namespace fpbvp {

NonConvergence::NonConvergence(double delta, double ratio)
    : std::runtime_error("Picard iteration did not converge (last delta " + std::to_string(delta) +
                         ", last contraction ratio " + std::to_string(ratio) + ")"),
      last_delta(delta),
      last_ratio(ratio) {}

WeightedSpline initial_iterate(const ProblemSpec& problem, const KnotCollection& knots, int q) {
    const double g = problem.gamma_exp();
    Vec w0(problem.d);
    for (std::size_t c = 0; c < problem.d; ++c) w0[c] = problem.x0_tilde[c] / specfun::gamma(g);
    return spline_project([&](double) { return w0; }, knots, q, g, problem.d);
}

WeightedSpline iterate_once(const ProblemSpec& problem, const SolverConfig& cfg,
                            const KnotCollection& knots, const WeightedSpline& x_m, Vec* i_T_out) {
    const MapParams p{problem.alpha, problem.beta_type, problem.horizon, cfg.eps};
    WeightedSpline upd =
        apply_spline_F(problem.f, x_m, knots, cfg.q, p, cfg.integrand, i_T_out);
    const double g = problem.gamma_exp();
    const double gg = specfun::gamma(g);
    for (std::size_t i = 0; i < knots.count(); ++i)
        for (std::size_t c = 0; c < problem.d; ++c) {
            const double w0 = problem.x0_tilde[c] / gg;
            for (int j = 0; j <= upd.q; ++j) upd.values[upd.idx(i, c) + j] += w0;
        }
    upd.finalize();
    return upd;
}

SolveResult solve_perturbed_ivp(const ProblemSpec& problem, const SolverConfig& cfg) {
    problem.validate();
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();
    const KnotCollection knots =
        resolve_knots(cfg.knots, cfg.eps, problem.horizon, problem.gamma_exp());

    SolveResult result;
    if (problem.has_m() && problem.has_K()) {
        result.assumptions = check_assumptions(problem, cfg);
        if (!result.assumptions->all_checkable_pass())
            result.warnings.push_back("assumption check failed; convergence not certified");
    } else {
        result.warnings.push_back("assumption check skipped (m or K not provided)");
    }

    WeightedSpline x = initial_iterate(problem, knots, cfg.q);
    Vec i_T(problem.d, 0.0);
    bool converged = false;
    int m = 0;
    while (m < cfg.max_iter) {
        ++m;
        WeightedSpline x_next = iterate_once(problem, cfg, knots, x, &i_T);
        double delta = 0.0;
        for (std::size_t n = 0; n < x.values.size(); ++n)
            delta = std::max(delta, std::abs(x_next.values[n] - x.values[n]));
        result.history.push_back(delta);
        // domain check on the weighted node values
        if (!problem.domain.all_space) {
            Vec w(problem.d);
            for (std::size_t i = 0; i < knots.count(); ++i)
                for (int j = 0; j <= cfg.q; ++j) {
                    for (std::size_t c = 0; c < problem.d; ++c)
                        w[c] = x_next.values[x_next.idx(i, c) + j];
                    if (!problem.domain.contains(w))
                        throw IterateEscapedDomain(x_next.node_t(i, j), w);
                }
        }
        x = std::move(x_next);
        if (delta < cfg.tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        const std::size_t n = result.history.size();
        const double ratio =
            n >= 2 && result.history[n - 2] > 0.0 ? result.history[n - 1] / result.history[n - 2]
                                                  : std::numeric_limits<double>::quiet_NaN();
        throw NonConvergence(result.history.back(), ratio);
    }

    result.solution = std::move(x);
    result.iterations = m;

    const double zeta = problem.zeta();
    const double pref = specfun::gamma(zeta + 1.0) * std::pow(problem.horizon, -zeta);
    result.delta_T.assign(problem.d, 0.0);
    for (std::size_t c = 0; c < problem.d; ++c) result.delta_T[c] = -pref * i_T[c];

    result.boundary_residual = boundary_residual(problem, cfg, result.solution);

    if (result.assumptions && result.assumptions->constants.have_K &&
        result.assumptions->constants.rho_Q < 1.0 && problem.has_m()) {
        result.apriori_bound =
            apriori_error_bound(result.assumptions->constants, problem.m, result.iterations);
    }

    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

Vec delta_T(const ProblemSpec& problem, const SolverConfig& cfg, const WeightedSpline& x) {
    const MapParams p{problem.alpha, problem.beta_type, problem.horizon, cfg.eps};
    Vec i_T;
    apply_spline_F(problem.f, x, x.knots, x.q, p, cfg.integrand, &i_T);
    const double zeta = problem.zeta();
    const double pref = specfun::gamma(zeta + 1.0) * std::pow(problem.horizon, -zeta);
    for (double& v : i_T) v = -pref * v;
    return i_T;
}

Vec boundary_residual(const ProblemSpec& problem, const SolverConfig& cfg,
                      const WeightedSpline& x) {
    (void)cfg;
    const double g = problem.gamma_exp();
    Vec res(problem.d);
    if (g >= 1.0) {
        const Vec xT = x.eval(problem.horizon);
        for (std::size_t c = 0; c < problem.d; ++c)
            res[c] = std::abs(xT[c] - problem.x0_tilde[c]);
        return res;
    }
    const Vec integral = frac_int_weighted_spline(x, 1.0 - g, x.knots.eps(), problem.horizon);
    for (std::size_t c = 0; c < problem.d; ++c)
        res[c] = std::abs(integral[c] - problem.x0_tilde[c]);
    return res;
}

std::string solve_diagnostics_json(const SolveResult& r) {
    nlohmann::json j;
    j["iterations"] = r.iterations;
    j["delta_T"] = r.delta_T;
    j["boundary_residual"] = r.boundary_residual;
    if (!r.apriori_bound.empty()) j["apriori_bound"] = r.apriori_bound;
    j["history"] = r.history;
    j["wall_time_s"] = r.wall_time_s;
    j["knots"] = r.solution.knots.count();
    j["warnings"] = r.warnings;
    if (r.assumptions) {
        nlohmann::json a;
        for (const auto& [k, v] : r.assumptions->key_values()) a[k] = v;
        j["assumptions"] = a;
    }
    return j.dump(2);
}

void solution_to_csv(const SolveResult& r, const ProblemSpec& problem, std::size_t grid_points,
                     std::ostream& os) {
    os << "t";
    for (std::size_t c = 0; c < problem.d; ++c) os << ",x" << c + 1;
    for (std::size_t c = 0; c < problem.d; ++c) os << ",w" << c + 1;
    os << "\n";
    os.precision(17);
    const double eps = r.solution.knots.eps(), T = r.solution.knots.horizon();
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double t = eps + (T - eps) * i / (grid_points - 1);
        const Vec w = r.solution.weighted_part(t);
        os << t;
        const double xw = std::pow(t, r.solution.gamma_exp - 1.0);
        for (std::size_t c = 0; c < problem.d; ++c) os << "," << w[c] * xw;
        for (std::size_t c = 0; c < problem.d; ++c) os << "," << w[c];
        os << "\n";
    }
}

}  // namespace fpbvp
