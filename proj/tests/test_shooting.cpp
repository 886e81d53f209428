#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fpbvp/shooting.hpp"
#include "test_util.hpp"

using namespace fpbvp;

namespace {

GridSearchSpec nonlinear_spec(double beta) {
    GridSearchSpec spec;
    spec.problem.d = 1;
    spec.problem.alpha = 0.75;
    spec.problem.beta_type = beta;
    spec.problem.horizon = 0.5;
    spec.problem.x0_tilde = {1.0};
    spec.problem.f = [](double t, const Vec& x) {
        return Vec{std::cos(x[0] * 4.0 * M_PI * t) / (2.0 * M_PI)};
    };
    spec.config.eps = 1e-10;
    spec.config.knots.kind = KnotKind::Graded;
    spec.customize = [](ProblemSpec& pr, double) {
        pr.m = {std::pow(pr.horizon, 1.0 - pr.gamma_exp()) / (2.0 * M_PI)};
        pr.K = Mat(1, 1, std::min(2.0 * pr.horizon, 1.0));
    };
    return spec;
}

}  // namespace

TEST_CASE("make_grid") {
    const auto g = make_grid(0.1, 0.5, 0.1);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == doctest::Approx(0.1));
    CHECK(g.back() == doctest::Approx(0.5));
    CHECK_THROWS_AS(make_grid(1.0, 0.5, 0.1), std::invalid_argument);
}

TEST_CASE("zero forcing: delta vanishes everywhere, argmin at the first point") {
    GridSearchSpec spec = nonlinear_spec(0.5);
    spec.problem.f = [](double, const Vec&) { return Vec{0.0}; };
    spec.customize = [](ProblemSpec& pr, double) {
        pr.m = {0.0};
        pr.K = Mat(1, 1, 0.0);
    };
    spec.values = make_grid(0.1, 0.4, 0.1);
    const auto res = grid_search(spec);
    for (const auto& p : res.table) {
        CHECK(p.converged);
        CHECK(p.abs_delta == 0.0);
    }
    CHECK(res.argmin_index == 0);
    CHECK(res.min_abs_delta == 0.0);
    // refinement is a no-op at an exact zero
    const auto fine = refine(spec, res, 4.0);
    CHECK(fine.min_abs_delta == 0.0);
}

TEST_CASE("x-independent forcing: delta is constant across an x0 grid") {
    GridSearchSpec spec;
    spec.variable = SearchVariable::X0Component;
    spec.problem.d = 1;
    spec.problem.alpha = 0.5;
    spec.problem.beta_type = 0.5;
    spec.problem.horizon = 3.0;
    spec.problem.x0_tilde = {1.0};
    spec.problem.f = [](double t, const Vec&) { return Vec{std::pow(t, 0.9)}; };
    spec.problem.m = {std::pow(3.0, 1.15)};
    spec.problem.K = Mat(1, 1, 0.0);
    spec.config.eps = 1e-10;
    spec.config.knots.kind = KnotKind::Uniform;
    spec.config.knots.h = 3.0 / 64.0;
    spec.values = make_grid(0.5, 2.0, 0.25);
    const auto res = grid_search(spec);
    for (const auto& p : res.table) {
        CHECK(p.converged);
        CHECK(p.delta[0] == doctest::Approx(res.table[0].delta[0]).epsilon(1e-12));
        CHECK(p.delta[0] == doctest::Approx(-1.5997).epsilon(2e-3));
    }
}

TEST_CASE("grid search is invariant to the thread count") {
    GridSearchSpec spec = nonlinear_spec(0.5);
    spec.values = make_grid(0.12, 0.24, 0.02);
    spec.threads = 1;
    const auto a = grid_search(spec);
    spec.threads = 3;
    const auto b = grid_search(spec);
    REQUIRE(a.table.size() == b.table.size());
    for (std::size_t i = 0; i < a.table.size(); ++i) {
        CHECK(a.table[i].delta[0] == b.table[i].delta[0]);
        CHECK(a.table[i].iterations == b.table[i].iterations);
    }
    CHECK(a.argmin_index == b.argmin_index);
}

TEST_CASE("nonlinear zero crossing near T = 0.19 and refinement improves it") {
    GridSearchSpec spec = nonlinear_spec(0.5);
    spec.values = make_grid(0.15, 0.25, 0.01);
    const auto res = grid_search(spec);
    const double tstar = res.table[res.argmin_index].value;
    CHECK(tstar >= 0.17);
    CHECK(tstar <= 0.21);
    const auto fine = refine(spec, res, 4.0);
    CHECK(fine.min_abs_delta <= res.min_abs_delta * (1.0 + 1e-12));
}

TEST_CASE("all points failing yields a no-candidate error") {
    GridSearchSpec spec = nonlinear_spec(0.5);
    spec.problem.f = [](double, const Vec&) {
        return Vec{std::numeric_limits<double>::quiet_NaN()};
    };
    spec.customize = nullptr;
    spec.values = make_grid(0.1, 0.3, 0.1);
    CHECK_THROWS_AS(grid_search(spec), std::runtime_error);
}

TEST_CASE("grid CSV is stable-ordered") {
    GridSearchSpec spec = nonlinear_spec(0.5);
    spec.values = make_grid(0.2, 0.3, 0.05);
    const auto res = grid_search(spec);
    std::ostringstream os;
    grid_result_to_csv(res, os);
    const std::string text = os.str();
    CHECK(text.find("value,abs_delta,converged,iterations,delta1,note") == 0);
    std::size_t lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + res.table.size());
}
