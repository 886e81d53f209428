#include "fpbvp/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fpbvp/specfun.hpp"

namespace fpbvp {

IterateEscapedDomain::IterateEscapedDomain(double t_, Vec x_)
    : std::runtime_error("iterate escaped the problem domain at t = " + std::to_string(t_)),
      t(t_),
      x(std::move(x_)) {}

namespace {

// ---------------------------------------------------------------------------
// Kernel moments.
//
// Everything reduces to  V^(m) = int_0^H (R - tau)^{mu-1} (tau/Hfull)^m dtau
// with 0 < H <= min(Hfull-ish, R). The family satisfies the all-positive
// backward recurrence
//   V^(m-1) = [ (mu+m) V^(m) + (R-H)^mu (H/Hfull)^m ] * Hfull / (m R),
// started at the top from the scaled incomplete-beta value
//   V^(M) = (H/Hfull)^M * H * R^{mu-1} * G(M, H/R),
//   G(M, z) = int_0^1 phi^M (1 - z phi)^{mu-1} dphi.
// The backward direction only damps relative error, which makes the family
// usable far beyond where the naive monomial expansion loses all precision.
// ---------------------------------------------------------------------------

double scaled_beta_moment(int M, double z, double mu) {
    if (z >= 1.0) return specfun::beta(M + 1.0, mu);
    if (z <= 0.9) {
        // one-signed series for mu < 1 (mildly signed above); geometric in z
        double acc = 1.0 / (M + 1.0);
        double coeff = 1.0;
        double zp = 1.0;
        for (int p = 1; p <= 4000; ++p) {
            coeff *= (p - mu) / p;
            zp *= z;
            const double term = coeff * zp / (M + p + 1.0);
            acc += term;
            if (std::abs(term) < 1e-17 * std::abs(acc) && p > 2) break;
        }
        return acc;
    }
    const double tail = specfun::incomplete_beta(1.0 - z, mu, M + 1.0);
    return (specfun::beta(M + 1.0, mu) - tail) * std::exp(-(M + 1.0) * std::log(z));
}

// Fills out[0..M] with V^(m) over the window [0, H] of a piece of width Hfull,
// evaluation offset R = t - A >= H.
void kernel_moments(int M, double H, double Hfull, double R, double mu, double* out) {
    const double z = std::min(H / R, 1.0);
    const double hw = H / Hfull;  // <= 1 up to roundoff
    out[M] = std::pow(hw, M) * H * std::pow(R, mu - 1.0) * scaled_beta_moment(M, z, mu);
    const double rmh = std::max(R - H, 0.0);
    const double bpow = rmh > 0.0 ? std::pow(rmh, mu) : 0.0;
    double hwm = std::pow(hw, M);
    for (int m = M; m >= 1; --m) {
        out[m - 1] = ((mu + m) * out[m] + bpow * hwm) * Hfull / (m * R);
        hwm /= hw;
    }
}

struct Workspace {
    std::vector<double> vhat, vhat_lo, gcoef, pascal, e, w;
};

Workspace& workspace() {
    thread_local Workspace ws;
    return ws;
}

// Pascal rows C(n, j) for n, j <= q, row-major (q+1) x (q+1).
void build_pascal(int q, std::vector<double>& p) {
    p.assign(static_cast<std::size_t>(q + 1) * (q + 1), 0.0);
    for (int n = 0; n <= q; ++n) {
        p[n * (q + 1)] = 1.0;
        for (int j = 1; j <= n; ++j)
            p[n * (q + 1) + j] =
                p[(n - 1) * (q + 1) + j - 1] + (j <= n - 1 ? p[(n - 1) * (q + 1) + j] : 0.0);
    }
}

// Contribution of piece i over the window [u, v] (v <= t) to
// int (t-s)^{mu-1} s^{gam-1} p_c(s) ds / Gamma(mu), accumulated into out.
void piece_contrib(const WeightedSpline& ws, std::size_t i, double u, double v, double t,
                   double mu, double inv_gamma_mu, Vec& out) {
    const double A = ws.knots.breakpoints[i];
    const double B = ws.knots.breakpoints[i + 1];
    const double hfull = B - A;
    const double gam = ws.gamma_exp;
    const int q = ws.q;
    Workspace& wk = workspace();

    if (A > 2.0 * hfull) {
        // Interior piece: expand s^{gam-1} = A^{gam-1} (1 + (hfull/A) x)^{gam-1}
        // as a geometric binomial series in the scaled-local variable.
        const double ratio = hfull / A;  // < 1/2
        int P = 0;
        if (gam != 1.0) P = std::min(64, static_cast<int>(std::ceil(40.0 / std::log(A / hfull))));
        const int M = q + P;
        wk.vhat.resize(M + 1);
        const double R = t - A;
        kernel_moments(M, v - A, hfull, R, mu, wk.vhat.data());
        if (u > A) {
            wk.vhat_lo.resize(M + 1);
            kernel_moments(M, u - A, hfull, R, mu, wk.vhat_lo.data());
            for (int m = 0; m <= M; ++m) wk.vhat[m] -= wk.vhat_lo[m];
        }
        wk.gcoef.resize(P + 1);
        wk.gcoef[0] = std::pow(A, gam - 1.0);
        for (int p = 0; p < P; ++p) wk.gcoef[p + 1] = wk.gcoef[p] * ((gam - 1.0 - p) / (p + 1.0)) * ratio;
        for (std::size_t c = 0; c < ws.dim; ++c) {
            const auto d = ws.piece_power(i, c);
            double s = 0.0;
            for (int n = 0; n <= q; ++n) {
                if (d[n] == 0.0) continue;
                double inner = 0.0;
                for (int p = 0; p <= P; ++p) inner += wk.gcoef[p] * wk.vhat[n + p];
                s += d[n] * inner;
            }
            out[c] += s * inv_gamma_mu;
        }
        return;
    }

    // Near-origin piece (A <= 2 hfull): global monomial expansion in sigma = s/B
    // is well conditioned here; each moment is an incomplete-beta difference.
    build_pascal(q, wk.pascal);
    wk.w.resize(q + 1);
    const double log_t_over_B = std::log(t / B);  // v <= B, so t/B >= v/B may exceed 1
    for (int j = 0; j <= q; ++j) {
        const double k = gam - 1.0 + j;
        // int_u^v (t-s)^{mu-1} s^{gam-1} (s/B)^j ds / Gamma(mu); the prefactor
        // exponent grows like j log(t/B) while the beta difference shrinks to
        // match, so the product is formed in log space
        const double pre_log =
            (mu + gam - 1.0) * std::log(t) + j * log_t_over_B - specfun::log_gamma(mu);
        double bdiff;
        if (v >= t) {
            bdiff = specfun::incomplete_beta((t - u) / t, mu, k + 1.0);
        } else if (u + v > t) {
            bdiff = specfun::incomplete_beta((t - u) / t, mu, k + 1.0) -
                    specfun::incomplete_beta((t - v) / t, mu, k + 1.0);
        } else {
            bdiff = specfun::incomplete_beta(v / t, k + 1.0, mu) -
                    specfun::incomplete_beta(u / t, k + 1.0, mu);
        }
        wk.w[j] = bdiff > 0.0 ? std::exp(pre_log + std::log(bdiff)) : 0.0;
    }
    const double b_over_h = B / hfull;  // <= 3 in this branch
    const double a_over_b = A / B;
    for (std::size_t c = 0; c < ws.dim; ++c) {
        const auto d = ws.piece_power(i, c);
        wk.e.assign(q + 1, 0.0);
        double scale_n = 1.0;  // (B/hfull)^n
        for (int n = 0; n <= q; ++n) {
            if (d[n] != 0.0) {
                double apow = 1.0;  // (A/B)^{n-j} built from j = n downward
                for (int j = n; j >= 0; --j) {
                    wk.e[j] += d[n] * scale_n * wk.pascal[n * (q + 1) + j] *
                               ((n - j) % 2 == 0 ? apow : -apow);
                    apow *= a_over_b;
                }
            }
            scale_n *= b_over_h;
        }
        double s = 0.0;
        for (int j = 0; j <= q; ++j) s += wk.e[j] * wk.w[j];
        out[c] += s;
    }
}

}  // namespace

Vec frac_int_weighted_spline(const WeightedSpline& ws, double order, double a, double t) {
    if (!(order > 0.0)) throw std::domain_error("frac_int_weighted_spline: order must be > 0");
    if (a > t) throw std::domain_error("frac_int_weighted_spline: need a <= t");
    const auto& bp = ws.knots.breakpoints;
    if (t > bp.back() * (1.0 + 1e-12))
        throw std::domain_error("frac_int_weighted_spline: t beyond the spline cover");
    Vec out(ws.dim, 0.0);
    const double inv_gamma_mu = std::exp(-specfun::log_gamma(order));
    for (std::size_t i = 0; i < ws.knots.count(); ++i) {
        const double A = bp[i], B = bp[i + 1];
        if (A >= t) break;
        const double u = std::max(A, a);
        const double v = std::min(B, t);
        if (v <= u) continue;
        piece_contrib(ws, i, u, v, t, order, inv_gamma_mu, out);
    }
    return out;
}

Vec apply_F_eps(const WeightedSpline& y, const MapParams& p, double t) {
    p.validate();
    const double lo = y.knots.eps();
    if (!(t > p.eps) || t > p.horizon * (1.0 + 1e-12))
        throw std::domain_error("apply_F_eps: need eps < t <= T");
    const double zeta = p.zeta();
    const double c2 = specfun::gamma(zeta + 1.0) /
                      (specfun::gamma(p.alpha + 1.0) * std::pow(p.horizon, zeta));
    Vec i_alpha = frac_int_weighted_spline(y, p.alpha, lo, t);
    const Vec i_T = frac_int_weighted_spline(y, zeta, lo, p.horizon);
    const double ta = std::pow(t, p.alpha);
    for (std::size_t c = 0; c < y.dim; ++c) i_alpha[c] -= c2 * ta * i_T[c];
    return i_alpha;
}

Vec apply_F(const WeightedSpline& y, const MapParams& p, double t) {
    if (!(t > 0.0)) throw std::domain_error("apply_F: need 0 < t <= T");
    // the eps -> 0 map: integrals start at the spline's left endpoint
    MapParams q = p;
    q.eps = 0.0;
    return apply_F_eps(y, q, t);
}

WeightedSpline apply_spline_F(const RhsFunction& f, const WeightedSpline& x_m,
                              const KnotCollection& knots, int q, const MapParams& p,
                              IntegrandRep rep, Vec* i_T_zeta_out) {
    p.validate();
    const double gam = p.gamma_exp();
    const double zeta = p.zeta();
    const std::size_t d = x_m.dim;

    // (1) integrand spline: plain samples of f, or weighted samples t^{1-gam} f
    WeightedSpline yhat;
    yhat.knots = knots;
    yhat.gamma_exp = rep == IntegrandRep::Weighted ? gam : 1.0;
    yhat.q = q;
    yhat.dim = d;
    yhat.values.assign(knots.count() * d * (q + 1), 0.0);
    for (std::size_t i = 0; i < knots.count(); ++i)
        for (int j = 0; j <= q; ++j) {
            const double tn = yhat.node_t(i, j);
            const Vec xv = x_m.eval(tn);
            Vec fv = f(tn, xv);
            if (fv.size() != d) throw std::invalid_argument("apply_spline_F: f dimension mismatch");
            for (std::size_t c = 0; c < d; ++c) {
                double val = fv[c];
                if (rep == IntegrandRep::Weighted) val *= std::pow(tn, 1.0 - gam);
                if (!std::isfinite(val)) throw IterateEscapedDomain(tn, xv);
                yhat.values[yhat.idx(i, c) + j] = val;
            }
        }
    yhat.finalize();

    // (2) the horizon integral determining Delta_T
    const double lo = knots.eps();
    const Vec i_T = frac_int_weighted_spline(yhat, zeta, lo, p.horizon);
    if (i_T_zeta_out) *i_T_zeta_out = i_T;
    const double c2 = specfun::gamma(zeta + 1.0) /
                      (specfun::gamma(p.alpha + 1.0) * std::pow(p.horizon, zeta));

    // (3) weighted image at every Bernstein node, (4) refit per knot
    WeightedSpline out;
    out.knots = knots;
    out.gamma_exp = gam;
    out.q = q;
    out.dim = d;
    out.values.assign(knots.count() * d * (q + 1), 0.0);
    for (std::size_t i = 0; i < knots.count(); ++i)
        for (int j = 0; j <= q; ++j) {
            const double tn = out.node_t(i, j);
            Vec fval = tn > lo ? frac_int_weighted_spline(yhat, p.alpha, lo, tn) : Vec(d, 0.0);
            const double ta = std::pow(tn, p.alpha);
            const double wgt = std::pow(tn, 1.0 - gam);
            for (std::size_t c = 0; c < d; ++c)
                out.values[out.idx(i, c) + j] = wgt * (fval[c] - c2 * ta * i_T[c]);
        }
    out.finalize();
    return out;
}

}  // namespace fpbvp
