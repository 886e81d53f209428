#include "fpbvp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpbvp/fracops.hpp"
#include "fpbvp/specfun.hpp"

namespace fpbvp::oracle {

namespace sf = specfun;
namespace qd = quadrature;

double quad_frac_integral(const std::function<double(double)>& y, double mu, double a, double t,
                          const qd::QuadratureSpec& spec, double lower_singular_exp) {
    if (!(mu > 0.0)) throw std::domain_error("quad_frac_integral: order must be > 0");
    if (a > t) throw std::domain_error("quad_frac_integral: need a <= t");
    if (a == t) return 0.0;
    const double mid = 0.5 * (a + t);
    double total = 0.0;
    double err = 0.0;
    // lower half: kernel is smooth; substitute away an s^{g-1} singularity at 0
    if (lower_singular_exp > 0.0 && lower_singular_exp < 1.0) {
        const double g = lower_singular_exp;
        auto integrand = [&](double u) {
            const double s = std::pow(u, 1.0 / g);
            return std::pow(t - s, mu - 1.0) * y(s) * std::pow(u, 1.0 / g - 1.0) / g;
        };
        const auto r = qd::integrate(integrand, std::pow(a, g), std::pow(mid, g), spec);
        total += r.value;
        err += r.error_estimate;
    } else {
        const auto r =
            qd::integrate([&](double s) { return std::pow(t - s, mu - 1.0) * y(s); }, a, mid, spec);
        total += r.value;
        err += r.error_estimate;
    }
    // upper half: substitute u = (t-s)^mu to remove the kernel singularity
    {
        auto integrand = [&](double u) { return y(t - std::pow(u, 1.0 / mu)) / mu; };
        const auto r = qd::integrate(integrand, 0.0, std::pow(t - mid, mu), spec);
        total += r.value;
        err += r.error_estimate;
    }
    if (err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total)) * 50.0)
        throw std::runtime_error("quad_frac_integral: quadrature did not converge (estimate " +
                                 std::to_string(err) + ")");
    return total / sf::gamma(mu);
}

double LinearClosedForm::nu() const {
    const double z = zeta();
    return -sf::gamma(z + 1.0) * sf::gamma(k + 1.0) / sf::gamma(z + k + 1.0) *
           std::pow(horizon, k);
}

double LinearClosedForm::operator()(double t) const {
    const double g = gamma_exp();
    return x0_tilde / sf::gamma(g) * std::pow(t, g - 1.0) +
           sf::gamma(k + 1.0) / sf::gamma(alpha + k + 1.0) * std::pow(t, alpha + k) +
           nu() * std::pow(t, alpha) / sf::gamma(alpha + 1.0);
}

double LinearClosedForm::eps_shifted(double eps, double t) const {
    const double g = gamma_exp();
    const double z = zeta();
    const double i_t = t > eps ? sf::frac_int_monomial_right(alpha, k, eps, t) : 0.0;
    const double i_T = sf::frac_int_monomial_right(z, k, eps, horizon);
    const double c2 =
        sf::gamma(z + 1.0) / (sf::gamma(alpha + 1.0) * std::pow(horizon, z));
    return x0_tilde / sf::gamma(g) * std::pow(t, g - 1.0) + i_t -
           c2 * std::pow(t, alpha) * i_T;
}

double linear_closed_form(double alpha, double beta_type, double k, double x0_tilde,
                          double horizon, double t) {
    return LinearClosedForm{alpha, beta_type, k, x0_tilde, horizon}(t);
}

Vec ReferenceSolution::weighted_at(double t) const {
    if (t < grid.front() || t > grid.back())
        throw std::domain_error("ReferenceSolution: t outside the grid");
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    std::size_t i = static_cast<std::size_t>(it - grid.begin());
    if (i == 0) i = 1;
    if (i >= grid.size()) i = grid.size() - 1;
    const double lam = (t - grid[i - 1]) / (grid[i] - grid[i - 1]);
    Vec out(weighted[i - 1].size());
    for (std::size_t c = 0; c < out.size(); ++c)
        out[c] = (1.0 - lam) * weighted[i - 1][c] + lam * weighted[i][c];
    return out;
}

Vec ReferenceSolution::at(double t) const {
    Vec out = weighted_at(t);
    const double w = std::pow(t, gamma_exp - 1.0);
    for (double& v : out) v *= w;
    return out;
}

ReferenceSolution reference_solution_eps(const ProblemSpec& problem, double eps,
                                         std::size_t dense_grid_size, double tol, int max_iter) {
    problem.validate();
    const double g = problem.gamma_exp();
    const double z = problem.zeta();
    const double T = problem.horizon;
    const KnotCollection kc =
        graded_knots({1.5, (T - eps) / static_cast<double>(dense_grid_size), eps, T}, g);
    const std::vector<double>& grid = kc.breakpoints;
    const std::size_t n = grid.size();
    const std::size_t d = problem.d;

    ReferenceSolution ref;
    ref.grid = grid;
    ref.gamma_exp = g;
    const double w0g = sf::gamma(g);
    ref.weighted.assign(n, Vec(d));
    for (auto& w : ref.weighted)
        for (std::size_t c = 0; c < d; ++c) w[c] = problem.x0_tilde[c] / w0g;

    const double c2 = sf::gamma(z + 1.0) / (sf::gamma(problem.alpha + 1.0) * std::pow(T, z));

    qd::QuadratureSpec qspec{1e-13, 1e-12, 200};
    std::vector<Vec> wf(n, Vec(d));  // weighted integrand samples t^{1-gamma} f
    auto wf_interp = [&](double s, std::size_t c) {
        auto it = std::upper_bound(grid.begin(), grid.end(), s);
        std::size_t i = static_cast<std::size_t>(it - grid.begin());
        if (i == 0) i = 1;
        if (i >= n) i = n - 1;
        const double lam = (s - grid[i - 1]) / (grid[i] - grid[i - 1]);
        return (1.0 - lam) * wf[i - 1][c] + lam * wf[i][c];
    };
    // integrand y_c(s) = s^{gamma-1} * wf_c(s)
    auto y_of = [&](std::size_t c) {
        return [&, c](double s) { return std::pow(s, g - 1.0) * wf_interp(s, c); };
    };
    auto frac_on_grid = [&](double mu, double tj, std::size_t c) {
        // piecewise quadrature honoring the interpolation kinks
        double acc = 0.0;
        auto y = y_of(c);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double u = grid[i];
            if (u >= tj) break;
            const double v = std::min(grid[i + 1], tj);
            if (v >= tj) {  // kernel-singular tail
                auto integrand = [&](double w) { return y(tj - std::pow(w, 1.0 / mu)) / mu; };
                acc += qd::integrate(integrand, 0.0, std::pow(tj - u, mu), qspec).value;
            } else {
                acc +=
                    qd::integrate([&](double s) { return std::pow(tj - s, mu - 1.0) * y(s); }, u,
                                  v, qspec)
                        .value;
            }
        }
        return acc / sf::gamma(mu);
    };

    int it = 0;
    for (; it < max_iter; ++it) {
        for (std::size_t j = 0; j < n; ++j) {
            Vec x(d);
            const double tpow = std::pow(grid[j], g - 1.0);
            for (std::size_t c = 0; c < d; ++c) x[c] = tpow * ref.weighted[j][c];
            const Vec fv = problem.f(grid[j], x);
            const double wpow = std::pow(grid[j], 1.0 - g);
            for (std::size_t c = 0; c < d; ++c) wf[j][c] = wpow * fv[c];
        }
        double delta = 0.0;
        std::vector<Vec> next(n, Vec(d));
        Vec i_T(d);
        for (std::size_t c = 0; c < d; ++c) i_T[c] = frac_on_grid(z, T, c);
        for (std::size_t j = 0; j < n; ++j) {
            const double tj = grid[j];
            const double ta = std::pow(tj, problem.alpha);
            const double wpow = std::pow(tj, 1.0 - g);
            for (std::size_t c = 0; c < d; ++c) {
                const double ia = j == 0 ? 0.0 : frac_on_grid(problem.alpha, tj, c);
                next[j][c] = problem.x0_tilde[c] / w0g + wpow * (ia - c2 * ta * i_T[c]);
                delta = std::max(delta, std::abs(next[j][c] - ref.weighted[j][c]));
            }
        }
        ref.weighted = std::move(next);
        if (delta < tol) {
            ref.converged = true;
            break;
        }
    }
    ref.iterations = it + 1;
    if (!ref.converged)
        throw std::runtime_error("reference_solution_eps: Picard iteration did not converge");
    return ref;
}

HilferResidualStats hilfer_residual(const WeightedSpline& x, const ProblemSpec& problem,
                                    const Vec& nu, std::span<const double> t_samples) {
    const double a = problem.alpha, b = problem.beta_type;
    const double r_in = (1.0 - b) * (1.0 - a);
    const double r_out = b * (1.0 - a);
    const double eps = x.knots.eps();

    // The inner integral is taken from 0, continuing the weighted part below
    // eps by its value there; the [0, eps] head is closed form. Without it the
    // eps-shifted inner integral has a boundary layer at eps whose derivative
    // re-enters through the outer integral (t^{gamma-1} would no longer be
    // annihilated).
    const double g_exp = x.gamma_exp;
    const Vec w_eps = x.weighted_part(eps);
    auto inner = [&](double s) -> Vec {
        if (r_in <= 0.0) return x.eval(s);
        Vec v = frac_int_weighted_spline(x, r_in, eps, s);
        const double head = std::pow(s, r_in + g_exp - 1.0) *
                            sf::incomplete_beta(eps / s, g_exp, r_in) / sf::gamma(r_in);
        for (std::size_t c = 0; c < v.size(); ++c) v[c] += w_eps[c] * head;
        return v;
    };
    auto inner_derivative = [&](double s, std::size_t c) {
        // keep the stencil inside [eps, T]
        const double h =
            std::min({1e-5 * s, 0.45 * (s - eps), 0.45 * (x.knots.horizon() - s)});
        if (!(h > 0.0)) return 0.0;
        auto diff = [&](double step) {
            const Vec hi = inner(s + step), lo = inner(s - step);
            return (hi[c] - lo[c]) / (2.0 * step);
        };
        const double d1 = diff(h), d2 = diff(0.5 * h);
        return (4.0 * d2 - d1) / 3.0;  // Richardson
    };

    HilferResidualStats stats;
    double sum = 0.0;
    for (double t : t_samples) {
        // stay away from knot boundaries and from eps (finite differences)
        const std::size_t i = x.knots.locate(t);
        const double h_i = x.knots.width(i);
        const double dist = std::min(t - x.knots.breakpoints[i], x.knots.breakpoints[i + 1] - t);
        if (dist < 0.05 * h_i || t - eps < 1e-3 * x.knots.horizon()) {
            ++stats.skipped;
            continue;
        }
        Vec deriv(problem.d);
        if (r_out <= 0.0) {
            for (std::size_t c = 0; c < problem.d; ++c) deriv[c] = inner_derivative(t, c);
        } else {
            // g' is singular towards the origin (~ s^{alpha + r_in - 2}), which
            // finite differences cannot resolve there. On the head sliver
            // integrate by parts instead -- g itself is closed-form:
            //   int_eps^d (t-s)^{r-1} g' ds = (t-d)^{r-1} g(d) - (t-eps)^{r-1} g(eps)
            //                                + (r-1) int_eps^d (t-s)^{r-2} g ds,
            // and use the difference quotient only on [d, t].
            const double d_split = std::max(t / 8.0, eps);
            const double inv_gr = 1.0 / sf::gamma(r_out);
            for (std::size_t c = 0; c < problem.d; ++c) {
                double head = 0.0;
                if (d_split > eps) {
                    const double boundary =
                        std::pow(t - d_split, r_out - 1.0) * inner(d_split)[c] -
                        std::pow(t - eps, r_out - 1.0) * inner(eps)[c];
                    const double tail =
                        qd::integrate(
                            [&](double s) {
                                return std::pow(t - s, r_out - 2.0) * inner(s)[c];
                            },
                            eps, d_split, {1e-12, 1e-11, 800})
                            .value;
                    head = (boundary + (r_out - 1.0) * tail) * inv_gr;
                }
                deriv[c] = head + quad_frac_integral(
                                      [&](double s) { return inner_derivative(s, c); }, r_out,
                                      d_split, t, {1e-9, 1e-8, 400});
            }
        }
        const Vec xv = x.eval(t);
        const Vec fv = problem.f(t, xv);
        double res = 0.0;
        for (std::size_t c = 0; c < problem.d; ++c)
            res = std::max(res, std::abs(deriv[c] - fv[c] - nu[c]));
        stats.max_abs = std::max(stats.max_abs, res);
        sum += res;
        ++stats.evaluated;
    }
    if (stats.evaluated > 0) stats.mean_abs = sum / stats.evaluated;
    return stats;
}

}  // namespace fpbvp::oracle
