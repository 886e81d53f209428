#pragma once

#include <stdexcept>

#include "fpbvp/problem.hpp"
#include "fpbvp/splines.hpp"

namespace fpbvp {

/// Parameters of the iteration maps F (eps = 0) and F_eps (eps > 0).
struct MapParams {
    double alpha;      // in (0, 1)
    double beta_type;  // in [0, 1]
    double horizon;    // T
    double eps = 0.0;

    double gamma_exp() const { return alpha + beta_type - alpha * beta_type; }
    double zeta() const { return 1.0 - gamma_exp() + alpha; }

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("MapParams: 0 < alpha < 1");
        if (!(beta_type >= 0.0 && beta_type <= 1.0))
            throw std::invalid_argument("MapParams: 0 <= beta <= 1");
        if (!(horizon > 0.0)) throw std::invalid_argument("MapParams: T > 0");
        if (eps < 0.0 || eps >= horizon) throw std::invalid_argument("MapParams: 0 <= eps < T");
    }
};

/// Thrown when an iterate leaves the problem domain or the right-hand side
/// returns a non-finite value; carries the offending location.
struct IterateEscapedDomain : std::runtime_error {
    double t;
    Vec x;
    IterateEscapedDomain(double t_, Vec x_);
};

/// Exact (to roundoff) Riemann-Liouville integral of the function
/// y(s) = s^{gamma-1} w(s) represented by the spline:
///   (I_a^t)^order y,  a <= t, both within the spline's cover.
/// Closed forms throughout: per piece the polynomial is integrated against
/// the kernel via incomplete-beta identities; no quadrature anywhere.
Vec frac_int_weighted_spline(const WeightedSpline& ws, double order, double a, double t);

/// F y(t) = I^alpha y(t) - Gamma(zeta+1) t^alpha / (Gamma(alpha+1) T^zeta) * I^zeta y(T).
/// For spline input the integrals start at the spline's left endpoint, so
/// apply_F realizes the eps -> 0 map when the spline starts near zero.
Vec apply_F(const WeightedSpline& y, const MapParams& p, double t);

/// Same combination with both integrals starting at eps (the spline's start).
Vec apply_F_eps(const WeightedSpline& y, const MapParams& p, double t);

/// One application of the spline iteration map: builds the integrand spline
/// from f composed with the current iterate, applies F_eps in closed form at
/// every Bernstein node, and fits the weighted image per knot.
/// The returned spline is the update term t^{gamma-1} S^q { t^{1-gamma} F_eps yhat }.
/// If i_T_zeta_out is non-null it receives I_eps^T^zeta yhat(T) (the integral
/// that determines Delta_T).
WeightedSpline apply_spline_F(const RhsFunction& f, const WeightedSpline& x_m,
                              const KnotCollection& knots, int q, const MapParams& p,
                              IntegrandRep rep, Vec* i_T_zeta_out = nullptr);

}  // namespace fpbvp
