#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "fpbvp/linalg.hpp"
#include "fpbvp/splines.hpp"

namespace fpbvp {

using RhsFunction = std::function<Vec(double, const Vec&)>;

/// Box constraint on the weighted values t^{1-gamma} x(t), or all of R^d.
struct Domain {
    bool all_space = true;
    Vec lower, upper;

    bool contains(const Vec& w) const {
        if (all_space) return true;
        for (std::size_t c = 0; c < w.size(); ++c)
            if (w[c] < lower[c] || w[c] > upper[c]) return false;
        return true;
    }
};

struct ProblemSpec {
    std::size_t d = 1;
    RhsFunction f;
    double alpha = 0.5;      // derivative order, in (0, 1)
    double beta_type = 0.5;  // Hilfer type, in [0, 1]
    double horizon = 1.0;    // T
    Vec x0_tilde;            // weighted initial value (the (1-gamma)-integral limit)
    Domain domain;
    Vec m;  // weighted bound on f; empty = not certified
    Mat K;  // Lipschitz matrix; empty = not certified

    double gamma_exp() const { return alpha + beta_type - alpha * beta_type; }
    double zeta() const { return 1.0 - gamma_exp() + alpha; }
    bool has_m() const { return !m.empty(); }
    bool has_K() const { return !K.empty(); }

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("need 0 < alpha < 1");
        if (!(beta_type >= 0.0 && beta_type <= 1.0)) throw std::invalid_argument("need 0 <= beta <= 1");
        if (!(horizon > 0.0)) throw std::invalid_argument("need T > 0");
        if (x0_tilde.size() != d) throw std::invalid_argument("x0_tilde dimension mismatch");
        if (!f) throw std::invalid_argument("missing right-hand side");
        if (has_m() && m.size() != d) throw std::invalid_argument("m dimension mismatch");
        if (has_K() && (K.rows != d || K.cols != d)) throw std::invalid_argument("K dimension mismatch");
        if (!domain.all_space && (domain.lower.size() != d || domain.upper.size() != d))
            throw std::invalid_argument("domain box dimension mismatch");
    }
};

enum class KnotKind { Uniform, Graded, Explicit };

/// How the integrand f(., x_m(.)) is represented before closed-form
/// integration: as a plain spline of f (default; matches the reference
/// numerics) or as a weighted spline of t^{1-gamma} f (use for forcings
/// singular at t = 0).
enum class IntegrandRep { Plain, Weighted };

struct KnotSpec {
    KnotKind kind = KnotKind::Uniform;
    double h = 0.1;                  // Uniform
    double c = 1.5, h_max = 1e-2;    // Graded
    std::vector<double> breakpoints; // Explicit
};

struct SolverConfig {
    double eps = 1e-10;
    int q = 1;
    KnotSpec knots;
    double tol = 1e-12;
    int max_iter = 200;
    IntegrandRep integrand = IntegrandRep::Plain;

    void validate() const {
        if (!(eps > 0.0)) throw std::invalid_argument("need eps > 0");
        if (q < 1) throw std::invalid_argument("need q >= 1");
        if (!(tol > 0.0)) throw std::invalid_argument("need tol > 0");
        if (max_iter < 1) throw std::invalid_argument("need max_iter >= 1");
    }
};

inline KnotCollection resolve_knots(const KnotSpec& spec, double eps, double horizon,
                                    double gamma_exp) {
    switch (spec.kind) {
        case KnotKind::Uniform: return uniform_knots(eps, horizon, spec.h);
        case KnotKind::Graded: return graded_knots({spec.c, spec.h_max, eps, horizon}, gamma_exp);
        case KnotKind::Explicit: return explicit_knots(spec.breakpoints);
    }
    throw std::logic_error("unreachable");
}

}  // namespace fpbvp
