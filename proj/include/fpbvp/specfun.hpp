#pragma once

#include <stdexcept>

namespace fpbvp::specfun {

/// Gamma function for positive arguments (Lanczos approximation, g = 7).
/// Relative accuracy ~1e-15 on (0, 170); overflows to +inf beyond ~171.6.
double gamma(double x);

/// log Gamma(x), x > 0.
double log_gamma(double x);

/// Complete beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a+b), a, b > 0.
double beta(double a, double b);

/// Non-regularized incomplete beta  B_z(a, b) = int_0^z u^{a-1} (1-u)^{b-1} du,
/// 0 <= z <= 1, a, b > 0. Continued fraction with the symmetry
/// B_z(a,b) = B(a,b) - B_{1-z}(b,a) applied for z past the stability switch.
double incomplete_beta(double z, double a, double b);

/// Regularized I_z(a, b) = B_z(a, b) / B(a, b). Internal helper for callers
/// that want the ratio; the non-regularized form is the module's contract.
double incomplete_beta_regularized(double z, double a, double b);

// Closed-form Riemann-Liouville integrals of monomials s^k, evaluated at t.
// All require alpha > 0, k > -1.

/// (I_0^t)^alpha s^k = Gamma(k+1)/Gamma(alpha+k+1) t^{alpha+k}
double frac_int_monomial_full(double alpha, double k, double t);

/// (I_0^b)^alpha s^k evaluated at t  (support [0, b], 0 < b <= t):
/// t^{alpha+k}/Gamma(alpha) * B_{b/t}(k+1, alpha)
double frac_int_monomial_left(double alpha, double k, double b, double t);

/// (I_b^t)^alpha s^k  (support [b, t], 0 <= b <= t):
/// t^{alpha+k}/Gamma(alpha) * B_{1-b/t}(alpha, k+1)
double frac_int_monomial_right(double alpha, double k, double b, double t);

/// Integral over an interior segment [a, b] of [0, t]; difference of local
/// forms, choosing the side with less cancellation. Additive over adjacent
/// segments and nonnegative for k > -1.
double frac_int_monomial_segment(double alpha, double k, double a, double b, double t);

}  // namespace fpbvp::specfun
