#include "fpbvp/constants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fpbvp/specfun.hpp"

namespace fpbvp {

namespace sf = specfun;

double xi_of_t(const MapParams& p, double t) {
    if (!(t > 0.0) || t > p.horizon * (1.0 + 1e-12))
        throw std::domain_error("xi_of_t: need 0 < t <= T");
    t = std::min(t, p.horizon);
    const double a = p.alpha, g = p.gamma_exp(), z = p.zeta(), T = p.horizon;
    const double tz = std::pow(t, z) * std::pow(T, a - z);
    const double term1 = sf::gamma(g) * std::pow(t, a) / sf::gamma(g + a);
    const double term2 =
        ((1.0 - g) / a - 1.0) * (tz / sf::gamma(a)) * sf::incomplete_beta(t / T, g, z);
    const double term3 =
        z * tz / sf::gamma(a + 1.0) * sf::incomplete_beta((T - t) / T, z, g);
    return term1 + term2 + term3;
}

double xi_sup(const MapParams& p, int grid_points) {
    p.validate();
    const double T = p.horizon;
    const double lo = T * 1e-12;
    double best_t = T, best = xi_of_t(p, T);
    const double step = std::log(T / lo) / (grid_points - 1);
    double argmax_left = lo, argmax_right = T;
    std::vector<double> ts(grid_points);
    for (int i = 0; i < grid_points; ++i) ts[i] = lo * std::exp(step * i);
    ts.back() = T;
    for (int i = 0; i < grid_points; ++i) {
        const double v = xi_of_t(p, ts[i]);
        if (v > best) {
            best = v;
            best_t = ts[i];
            argmax_left = i > 0 ? ts[i - 1] : lo;
            argmax_right = i + 1 < grid_points ? ts[i + 1] : T;
        }
    }
    // golden-section refinement around the grid argmax
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = argmax_left, b = argmax_right;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = xi_of_t(p, c), fd = xi_of_t(p, d);
    for (int it = 0; it < 200 && (b - a) > 1e-10 * best_t; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = xi_of_t(p, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = xi_of_t(p, d);
        }
    }
    return std::max({best, fc, fd});
}

double theta_eps(const MapParams& p) {
    p.validate();
    if (!(p.eps > 0.0)) throw std::domain_error("theta_eps: need 0 < eps < T");
    const double a = p.alpha, g = p.gamma_exp(), z = p.zeta(), T = p.horizon;
    return std::pow(p.eps, a) / sf::gamma(a) * sf::beta(g, a) +
           z * std::pow(T, a) / sf::gamma(a + 1.0) * sf::incomplete_beta(p.eps / T, g, z);
}

double omega(const MapParams& p, double t, double t_prime) {
    if (!(t < t_prime)) throw std::domain_error("omega: need t < t'");
    if (t < p.eps || t_prime > p.horizon * (1.0 + 1e-12))
        throw std::domain_error("omega: pair outside [eps, T]");
    const double a = p.alpha, g = p.gamma_exp(), z = p.zeta(), T = p.horizon;
    const double gap = t_prime - t;
    const double term1 = std::pow(gap, a) / sf::gamma(a + 1.0) *
                         (a * sf::beta(g, a) + 2.0 * std::pow(t_prime / t, 1.0 - g));
    const double term2 =
        std::pow(gap, z) * std::pow(T, a - z) / sf::gamma(a + 1.0) * z * sf::beta(g, z);
    return term1 + term2;
}

double omega_spline(const KnotCollection& knots, int q, const MapParams& p) {
    knots.validate();
    if (q < 1) throw std::invalid_argument("omega_spline: q >= 1");
    const double rq = std::sqrt(static_cast<double>(q));
    double worst = 0.0;
    for (std::size_t i = 0; i < knots.count(); ++i) {
        const double h = knots.width(i);
        if (!(h > 0.0)) throw std::invalid_argument("omega_spline: degenerate knot");
        const double delta = std::min(h / rq, h);
        const double t = knots.breakpoints[i];
        worst = std::max(worst, omega(p, t, t + delta));
    }
    return 1.25 * worst;
}

double omega_spline_dense(const KnotCollection& knots, int q, const MapParams& p,
                          int pairs_per_knot) {
    const double rq = std::sqrt(static_cast<double>(q));
    double worst = 0.0;
    for (std::size_t i = 0; i < knots.count(); ++i) {
        const double h = knots.width(i);
        const double delta = std::min(h / rq, h);
        const double t0 = knots.breakpoints[i], t1 = knots.breakpoints[i + 1];
        for (int j = 0; j < pairs_per_knot; ++j) {
            double t = t0 + (t1 - delta - t0) * j / std::max(1, pairs_per_knot - 1);
            t = std::max(t, t0);  // guard rounding below the knot start
            const double tp = std::min(t + delta, t1);
            if (tp > t) worst = std::max(worst, omega(p, t, tp));
        }
    }
    return 1.25 * worst;
}

double spectral_radius(const Mat& m) {
    if (m.rows != m.cols) throw std::invalid_argument("spectral_radius: square matrix required");
    const std::size_t n = m.rows;
    for (double v : m.a)
        if (v < 0.0) throw std::domain_error("spectral_radius: negative entry");
    if (n == 0) return 0.0;
    if (n == 1) return m(0, 0);
    // power iteration on M + I; the shift makes the dominant eigenvalue
    // 1 + rho(M) and removes periodicity
    Vec v(n, 1.0);
    double lam = 1.0;
    for (int it = 0; it < 20000; ++it) {
        Vec w = m * v;
        for (std::size_t i = 0; i < n; ++i) w[i] += v[i];
        const double nrm = max_abs(w);
        if (nrm == 0.0) return 0.0;
        for (double& x : w) x /= nrm;
        const double change = std::abs(nrm - lam);
        lam = nrm;
        v = std::move(w);
        if (change <= 1e-13 * std::max(1.0, lam) && it > 3) break;
    }
    return std::max(0.0, lam - 1.0);
}

ConvergenceConstants compute_constants(const ProblemSpec& problem, const SolverConfig& cfg,
                                       const KnotCollection& knots) {
    MapParams p{problem.alpha, problem.beta_type, problem.horizon, cfg.eps};
    ConvergenceConstants cc;
    cc.Xi = xi_sup(p);
    cc.Theta_eps = theta_eps(p);
    cc.Omega_Aq = omega_spline(knots, cfg.q, p);
    if (problem.has_K()) {
        cc.have_K = true;
        cc.Q = problem.K.scaled(cc.Xi);
        cc.Q_star = problem.K.scaled(cc.Xi + cc.Omega_Aq);
        cc.rho_Q = spectral_radius(cc.Q);
        cc.rho_Q_star = spectral_radius(cc.Q_star);
    }
    return cc;
}

namespace {

std::string verdict_str(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        default: return "not-checkable";
    }
}

AssumptionCheck check_ball(const ProblemSpec& pr, double radius_factor, const char* tag) {
    AssumptionCheck out;
    std::ostringstream os;
    if (!pr.has_m()) {
        os << tag << ": m not provided";
        out.witness = os.str();
        return out;
    }
    const double g = pr.gamma_exp();
    const double gg = sf::gamma(g);
    bool ok = true;
    os.precision(6);
    os << tag << ": ball radius factor " << radius_factor << ", center x0/Gamma(gamma)";
    if (!pr.domain.all_space) {
        for (std::size_t c = 0; c < pr.d; ++c) {
            const double center = pr.x0_tilde[c] / gg;
            const double r = radius_factor * pr.m[c];
            if (center - r < pr.domain.lower[c] || center + r > pr.domain.upper[c]) ok = false;
        }
        os << (ok ? "; contained in D" : "; leaves D");
    } else {
        os << "; D = all space";
    }
    out.verdict = ok ? Verdict::Pass : Verdict::Fail;
    out.witness = os.str();
    return out;
}

AssumptionCheck check_spectral(const ProblemSpec& pr, double factor, double rho, const char* tag) {
    AssumptionCheck out;
    std::ostringstream os;
    os.precision(6);
    if (!pr.has_K()) {
        os << tag << ": K not provided";
        out.witness = os.str();
        return out;
    }
    os << tag << ": rho(" << factor << " * K) = " << rho;
    out.verdict = rho < 1.0 ? Verdict::Pass : Verdict::Fail;
    out.witness = os.str();
    return out;
}

AssumptionCheck check_certified(const ProblemSpec& pr, const char* tag) {
    AssumptionCheck out;
    if (pr.has_m() && pr.has_K()) {
        out.verdict = Verdict::Pass;
        out.witness = std::string(tag) + ": bound m and Lipschitz K user-certified";
    } else {
        out.witness = std::string(tag) + ": m or K not provided";
    }
    return out;
}

}  // namespace

bool AssumptionReport::all_checkable_pass() const {
    for (const auto* c : {&a1, &a2, &a3, &a1s, &a2s, &a3s})
        if (c->verdict == Verdict::Fail) return false;
    return true;
}

std::string AssumptionReport::to_text() const {
    std::ostringstream os;
    os.precision(10);
    os << "Xi        = " << constants.Xi << "\n"
       << "Theta_eps = " << constants.Theta_eps << "\n"
       << "Omega_A^q = " << constants.Omega_Aq << "\n";
    if (constants.have_K)
        os << "rho(Q)    = " << constants.rho_Q << "\n"
           << "rho(Q*)   = " << constants.rho_Q_star << "\n";
    auto line = [&](const char* name, const AssumptionCheck& c) {
        os << name << ": " << verdict_str(c.verdict) << "  [" << c.witness << "]\n";
    };
    line("A.1 ", a1);
    line("A.2 ", a2);
    line("A.3 ", a3);
    line("A.1*", a1s);
    line("A.2*", a2s);
    line("A.3*", a3s);
    return os.str();
}

std::vector<std::pair<std::string, std::string>> AssumptionReport::key_values() const {
    auto fmt = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("Xi", fmt(constants.Xi));
    kv.emplace_back("Theta_eps", fmt(constants.Theta_eps));
    kv.emplace_back("Omega_Aq", fmt(constants.Omega_Aq));
    if (constants.have_K) {
        kv.emplace_back("rho_Q", fmt(constants.rho_Q));
        kv.emplace_back("rho_Q_star", fmt(constants.rho_Q_star));
    }
    kv.emplace_back("A1", verdict_str(a1.verdict));
    kv.emplace_back("A2", verdict_str(a2.verdict));
    kv.emplace_back("A3", verdict_str(a3.verdict));
    kv.emplace_back("A1_star", verdict_str(a1s.verdict));
    kv.emplace_back("A2_star", verdict_str(a2s.verdict));
    kv.emplace_back("A3_star", verdict_str(a3s.verdict));
    return kv;
}

AssumptionReport check_assumptions(const ProblemSpec& problem, const SolverConfig& cfg) {
    problem.validate();
    cfg.validate();
    const KnotCollection knots =
        resolve_knots(cfg.knots, cfg.eps, problem.horizon, problem.gamma_exp());
    AssumptionReport rep;
    rep.constants = compute_constants(problem, cfg, knots);
    rep.a1 = check_ball(problem, rep.constants.Xi, "A.1");
    rep.a1s = check_ball(problem, rep.constants.Xi + rep.constants.Omega_Aq, "A.1*");
    rep.a2 = check_certified(problem, "A.2");
    rep.a2s = check_certified(problem, "A.2*");
    if (problem.has_K()) {
        rep.a3 = check_spectral(problem, rep.constants.Xi, rep.constants.rho_Q, "A.3");
        rep.a3s = check_spectral(problem, rep.constants.Xi + rep.constants.Omega_Aq,
                                 rep.constants.rho_Q_star, "A.3*");
    } else {
        rep.a3.witness = "A.3: K not provided";
        rep.a3s.witness = "A.3*: K not provided";
    }
    return rep;
}

Vec apriori_error_bound(const ConvergenceConstants& constants, const Vec& m, int iterations) {
    if (!constants.have_K) throw std::invalid_argument("apriori_error_bound: K unavailable");
    if (constants.rho_Q >= 1.0)
        throw std::runtime_error("apriori_error_bound: rho(Q) >= 1, bound unavailable");
    const std::size_t n = constants.Q.rows;
    Vec xim(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) xim[i] = constants.Xi * m[i];
    // (I - Q)^{-1} Xi m, then Q^iterations applied to it
    Mat imq = Mat::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) imq(i, j) -= constants.Q(i, j);
    Vec base = solve_linear(imq, xim);
    return mat_pow(constants.Q, static_cast<unsigned>(iterations)) * base;
}

}  // namespace fpbvp
