#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fpbvp/linalg.hpp"

namespace fpbvp {

/// Ordered breakpoints t_0 = eps < t_1 < ... < t_{k+1} = T defining the
/// disjoint intervals [t_i, t_{i+1}) (the last one closed) that cover [eps, T].
struct KnotCollection {
    std::vector<double> breakpoints;

    std::size_t count() const { return breakpoints.empty() ? 0 : breakpoints.size() - 1; }
    double eps() const { return breakpoints.front(); }
    double horizon() const { return breakpoints.back(); }
    double width(std::size_t i) const { return breakpoints[i + 1] - breakpoints[i]; }

    /// Interval index for t in [eps, T]; interior knot points belong to the
    /// right interval, t = T to the last.
    std::size_t locate(double t) const;

    void validate() const;
};

struct GradedKnotParams {
    double c;      // growth bound, > 1
    double h_max;  // maximum knot width
    double eps;    // left endpoint t_0 > 0
    double horizon;
};

KnotCollection uniform_knots(double eps, double horizon, double h);

/// Knot widths h_i = min(h_max, (c^{1/(1-gamma)} - 1) t_i) for gamma < 1
/// (h_max throughout for gamma = 1), so that (t_{i+1}/t_i)^{1-gamma} <= c.
/// The last breakpoint is clamped to the horizon; a final sliver narrower
/// than 1e-12*T is merged into its predecessor.
KnotCollection graded_knots(const GradedKnotParams& params, double gamma_exp);

KnotCollection explicit_knots(std::vector<double> breakpoints);

/// B^q f at t from the q+1 node values f(a + j(b-a)/q) (de Casteljau).
double bernstein_eval(std::span<const double> node_values, double a, double b, double t);

/// Samples f at the q+1 equispaced Bernstein nodes of [a, b].
std::vector<double> bernstein_fit(const std::function<double(double)>& f, double a, double b,
                                  int q);

/// Coefficients d_n of the same polynomial in the scaled-local power basis
/// x^n, x = (t-a)/(b-a):  d_n = C(q,n) * (forward difference)^n v_0.
void local_power_coeffs(std::span<const double> node_values, std::span<double> out);

/// Piecewise Bernstein representation of the weighted part w(t) = t^{1-gamma} x(t).
/// values holds the node samples; power caches the scaled-local power
/// coefficients used by the closed-form fractional integration.
struct WeightedSpline {
    KnotCollection knots;
    double gamma_exp = 1.0;
    int q = 1;
    std::size_t dim = 1;
    std::vector<double> values;
    std::vector<double> power;

    std::size_t idx(std::size_t i, std::size_t c) const { return (i * dim + c) * (q + 1); }
    double node_t(std::size_t i, int j) const {
        return j == q ? knots.breakpoints[i + 1]
                      : knots.breakpoints[i] + j * knots.width(i) / q;
    }
    std::span<const double> piece_values(std::size_t i, std::size_t c) const {
        return {values.data() + idx(i, c), static_cast<std::size_t>(q + 1)};
    }
    std::span<const double> piece_power(std::size_t i, std::size_t c) const {
        return {power.data() + idx(i, c), static_cast<std::size_t>(q + 1)};
    }

    /// Recomputes the cached power coefficients from the node values.
    void finalize();

    /// w(t); t must lie in [eps, T].
    Vec weighted_part(double t) const;

    /// x(t) = t^{gamma-1} w(t).
    Vec eval(double t) const;
};

/// Per-interval Bernstein fit of a (weighted) function; the node samples are
/// the spline coefficients, so the composite operator S^q is realized by
/// sampling alone. Possibly discontinuous at knots.
WeightedSpline spline_project(const std::function<Vec(double)>& w, const KnotCollection& knots,
                              int q, double gamma_exp, std::size_t dim);

// Serialization (documented layout; see README).
std::string spline_to_json(const WeightedSpline& ws);
WeightedSpline spline_from_json(const std::string& text);
void spline_to_csv(const WeightedSpline& ws, std::ostream& os);

Vec weighted_eval(const WeightedSpline& ws, double t);  // = ws.eval(t)

}  // namespace fpbvp
