#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fpbvp/oracle.hpp"
#include "fpbvp/solver.hpp"
#include "fpbvp/specfun.hpp"
#include "test_util.hpp"

using namespace fpbvp;
namespace sf = specfun;

TEST_CASE("quad_frac_integral: reference values") {
    CHECK(oracle::quad_frac_integral([](double) { return 1.0; }, 0.5, 0.0, 1.0) ==
          doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-12));
    const double got = oracle::quad_frac_integral([](double s) { return std::pow(s, 0.9); }, 0.5,
                                                  0.0, 3.0, {1e-14, 1e-13, 4000});
    CHECK(got == doctest::Approx(sf::frac_int_monomial_full(0.5, 0.9, 3.0)).epsilon(1e-10));
    // y(s) = s^{gamma-1}, mu = 1-gamma: constant Gamma(gamma)
    const double g = 0.75;
    const double c = oracle::quad_frac_integral(
        [&](double s) { return std::pow(s, g - 1.0); }, 1.0 - g, 0.0, 2.2, {1e-13, 1e-12, 4000},
        g);
    CHECK(c == doctest::Approx(sf::gamma(g)).epsilon(1e-10));
}

TEST_CASE("linear closed form: nu and the integral-equation identity") {
    const oracle::LinearClosedForm cf{0.5, 0.5, 0.9, 1.0, 3.0};
    CHECK(cf.nu() == doctest::Approx(-1.5997).epsilon(5e-5));
    // x(t) - x0 t^{g-1}/Gamma(g) - I^alpha t^0.9 - nu t^alpha / Gamma(alpha+1) = 0
    const double g = cf.gamma_exp();
    for (double t : {0.5, 1.7, 3.0}) {
        const double i_alpha = oracle::quad_frac_integral(
            [](double s) { return std::pow(s, 0.9); }, 0.5, 0.0, t, {1e-13, 1e-12, 4000});
        const double lhs = cf(t) - std::pow(t, g - 1.0) / sf::gamma(g) - i_alpha -
                           cf.nu() * std::pow(t, 0.5) / sf::gamma(1.5);
        CHECK(std::abs(lhs) <= 1e-9);
    }
    CHECK(oracle::linear_closed_form(0.5, 0.5, 0.9, 1.0, 3.0, 1.0) == doctest::Approx(cf(1.0)));
}

TEST_CASE("eps-shifted closed form approaches the eps = 0 form away from zero") {
    const oracle::LinearClosedForm cf{0.5, 0.5, 0.9, 1.0, 3.0};
    for (double t : {0.5, 2.0, 3.0})
        CHECK(cf.eps_shifted(1e-12, t) == doctest::Approx(cf(t)).epsilon(1e-9));
}

TEST_CASE("reference_solution_eps agrees with the linear closed form") {
    ProblemSpec pr;
    pr.d = 1;
    pr.alpha = 0.5;
    pr.beta_type = 0.5;
    pr.horizon = 3.0;
    pr.x0_tilde = {1.0};
    pr.f = [](double t, const Vec&) { return Vec{std::pow(t, 0.9)}; };
    const double eps = 1e-6;
    const auto ref = oracle::reference_solution_eps(pr, eps, 400);
    CHECK(ref.converged);
    const oracle::LinearClosedForm cf{0.5, 0.5, 0.9, 1.0, 3.0};
    const double g = pr.gamma_exp();
    double worst = 0.0;
    for (const double t : ref.grid)
        worst = std::max(worst, std::abs(std::pow(t, 1.0 - g) *
                                         (ref.at(t)[0] - cf.eps_shifted(eps, t))));
    CHECK(worst <= 1e-4);
}

TEST_CASE("reference_solution_eps: zero forcing returns the initial iterate exactly") {
    ProblemSpec pr;
    pr.d = 1;
    pr.alpha = 0.6;
    pr.beta_type = 0.3;
    pr.horizon = 1.0;
    pr.x0_tilde = {2.0};
    pr.f = [](double, const Vec&) { return Vec{0.0}; };
    const auto ref = oracle::reference_solution_eps(pr, 1e-8, 100);
    const double g = pr.gamma_exp();
    for (const auto& w : ref.weighted)
        CHECK(w[0] == doctest::Approx(2.0 / sf::gamma(g)).epsilon(1e-14));
}

TEST_CASE("reference is grid-converged: doubling changes reported errors < 5%") {
    ProblemSpec pr;
    pr.d = 1;
    pr.alpha = 0.75;
    pr.beta_type = 0.5;
    pr.horizon = 0.5;
    pr.x0_tilde = {1.0};
    pr.f = [](double t, const Vec& x) {
        return Vec{std::cos(x[0] * 4.0 * M_PI * t) / (2.0 * M_PI)};
    };
    SolverConfig cfg;
    cfg.eps = 1e-10;
    cfg.knots.kind = KnotKind::Graded;
    cfg.knots.h_max = 0.05;  // deliberately coarse system under test
    const auto res = solve_perturbed_ivp(pr, cfg);
    const double g = pr.gamma_exp();
    auto sup_err = [&](const oracle::ReferenceSolution& ref) {
        double sup = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            const double t = cfg.eps + (0.5 - cfg.eps) * i / 2000.0;
            sup = std::max(sup, std::pow(t, 1.0 - g) *
                                    std::abs(res.solution.eval(t)[0] - ref.at(t)[0]));
        }
        return sup;
    };
    const std::size_t n = res.solution.knots.count();
    const double e1 = sup_err(oracle::reference_solution_eps(pr, cfg.eps, 8 * n));
    const double e2 = sup_err(oracle::reference_solution_eps(pr, cfg.eps, 16 * n));
    CHECK(std::abs(e1 - e2) <= 0.05 * e1);
}

TEST_CASE("hilfer residual: t^{gamma-1} is annihilated") {
    ProblemSpec pr;
    pr.d = 1;
    pr.alpha = 0.5;
    pr.beta_type = 0.5;
    pr.horizon = 3.0;
    pr.x0_tilde = {1.0};
    pr.f = [](double, const Vec&) { return Vec{0.0}; };
    const KnotCollection kc = uniform_knots(1e-10, 3.0, 0.1);
    const auto x0 = initial_iterate(pr, kc, 2);
    const Vec samples{0.74, 1.33, 2.51};
    const auto stats = oracle::hilfer_residual(x0, pr, Vec{0.0}, samples);
    CHECK(stats.evaluated == 3);
    CHECK(stats.max_abs <= 1e-3);
}

TEST_CASE("hilfer residual of the linear closed-form solution") {
    const oracle::LinearClosedForm cf{0.5, 0.5, 0.9, 1.0, 3.0};
    ProblemSpec pr;
    pr.d = 1;
    pr.alpha = 0.5;
    pr.beta_type = 0.5;
    pr.horizon = 3.0;
    pr.x0_tilde = {1.0};
    pr.f = [](double t, const Vec&) { return Vec{std::pow(t, 0.9)}; };
    const double g = pr.gamma_exp();
    const KnotCollection kc = uniform_knots(1e-6, 3.0, 0.05);
    auto x = spline_project(
        [&](double t) { return Vec{std::pow(t, 1.0 - g) * cf(t)}; }, kc, 3, g, 1);
    const Vec samples{0.52, 1.18, 1.77, 2.63};
    const auto stats = oracle::hilfer_residual(x, pr, Vec{cf.nu()}, samples);
    CHECK(stats.evaluated == 4);
    CHECK(stats.max_abs <= 1e-3);
}

TEST_CASE("hilfer residual: Caputo case (beta = 1) runs on a converged solve") {
    ProblemSpec pr;
    pr.d = 1;
    pr.alpha = 0.75;
    pr.beta_type = 1.0;
    pr.horizon = 0.5;
    pr.x0_tilde = {1.0};
    pr.f = [](double t, const Vec& x) {
        return Vec{std::cos(x[0] * 4.0 * M_PI * t) / (2.0 * M_PI)};
    };
    SolverConfig cfg;
    cfg.eps = 1e-10;
    cfg.knots.kind = KnotKind::Graded;
    cfg.knots.h_max = 5e-3;
    cfg.q = 3;
    const auto res = solve_perturbed_ivp(pr, cfg);
    const Vec samples{0.152, 0.301, 0.433};
    const auto stats = oracle::hilfer_residual(res.solution, pr, res.delta_T, samples);
    CHECK(stats.evaluated >= 2);
    CHECK(stats.max_abs <= 5e-2);  // finite differences against an oscillatory forcing
}
