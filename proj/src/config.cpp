#include "fpbvp/config.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "fpbvp/expression.hpp"

namespace fpbvp::config {

using nlohmann::json;

namespace {

Vec read_vec(const json& j, std::size_t d, const char* what) {
    Vec v;
    if (j.is_number()) {
        v.assign(d, j.get<double>());
    } else if (j.is_array()) {
        v = j.get<Vec>();
    } else {
        throw ConfigError(std::string(what) + ": expected number or array");
    }
    if (v.size() != d) throw ConfigError(std::string(what) + ": dimension mismatch");
    return v;
}

Mat read_mat(const json& j, std::size_t d, const char* what) {
    Mat m(d, d);
    if (j.is_number()) {
        for (std::size_t i = 0; i < d; ++i) m(i, i) = j.get<double>();
        return m;
    }
    if (!j.is_array() || j.size() != d) throw ConfigError(std::string(what) + ": expected d x d array");
    for (std::size_t i = 0; i < d; ++i) {
        if (!j[i].is_array() || j[i].size() != d)
            throw ConfigError(std::string(what) + ": expected d x d array");
        for (std::size_t c = 0; c < d; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

}  // namespace

void refresh_registry_defaults(const RhsSpec& rhs, bool m_from_user, bool K_from_user,
                               ProblemSpec& pr) {
    const double g = pr.gamma_exp();
    switch (rhs.kind) {
        case RhsKind::Monomial:
            if (!m_from_user) pr.m.assign(pr.d, std::pow(pr.horizon, 1.0 - g + rhs.k));
            if (!K_from_user) pr.K = Mat(pr.d, pr.d, 0.0);
            break;
        case RhsKind::CosineTwoPi:
            if (!m_from_user) pr.m.assign(pr.d, std::pow(pr.horizon, 1.0 - g) / (2.0 * M_PI));
            if (!K_from_user) {
                pr.K = Mat(pr.d, pr.d, 0.0);
                for (std::size_t i = 0; i < pr.d; ++i) pr.K(i, i) = 2.0 * pr.horizon;
            }
            break;
        case RhsKind::Zero:
            if (!m_from_user) pr.m.assign(pr.d, 0.0);
            if (!K_from_user) pr.K = Mat(pr.d, pr.d, 0.0);
            break;
        case RhsKind::Expression:
            break;  // m and K only if the user certified them
    }
}

void refresh_registry_defaults(ProblemConfig& pc) {
    refresh_registry_defaults(pc.rhs, pc.m_from_user, pc.K_from_user, pc.problem);
}

void rebind_rhs(ProblemConfig& pc) {
    ProblemSpec& pr = pc.problem;
    const std::size_t d = pr.d;
    switch (pc.rhs.kind) {
        case RhsKind::Monomial: {
            const double k = pc.rhs.k;
            pr.f = [d, k](double t, const Vec&) { return Vec(d, std::pow(t, k)); };
            break;
        }
        case RhsKind::CosineTwoPi:
            pr.f = [d](double t, const Vec& x) {
                Vec out(d);
                for (std::size_t c = 0; c < d; ++c)
                    out[c] = std::cos(x[c] * 4.0 * M_PI * t) / (2.0 * M_PI);
                return out;
            };
            break;
        case RhsKind::Zero:
            pr.f = [d](double, const Vec&) { return Vec(d, 0.0); };
            break;
        case RhsKind::Expression: {
            if (pc.rhs.components.size() != d)
                throw ConfigError("f.components: need one expression per component");
            auto asts = std::make_shared<std::vector<expr::NodePtr>>();
            for (const auto& src : pc.rhs.components) {
                try {
                    asts->push_back(expr::parse_expression(src, d));
                } catch (const expr::ParseError& e) {
                    throw ConfigError("f.components: " + std::string(e.what()) + " in \"" + src +
                                      "\"");
                }
            }
            pr.f = [asts, d](double t, const Vec& x) {
                Vec out(d);
                for (std::size_t c = 0; c < d; ++c) out[c] = expr::eval(*(*asts)[c], t, x);
                return out;
            };
            break;
        }
    }
}

ProblemConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ProblemConfig pc;
    ProblemSpec& pr = pc.problem;
    try {
        pr.alpha = j.at("alpha").get<double>();
        pr.beta_type = j.at("beta").get<double>();
        pr.horizon = j.at("T").get<double>();
        const json& jx0 = j.at("x0_tilde");
        if (jx0.is_number()) {
            pr.d = 1;
            pr.x0_tilde = {jx0.get<double>()};
        } else {
            pr.x0_tilde = jx0.get<Vec>();
            pr.d = pr.x0_tilde.size();
        }

        const json& jf = j.at("f");
        const std::string kind = jf.at("kind").get<std::string>();
        if (kind == "monomial") {
            pc.rhs.kind = RhsKind::Monomial;
            pc.rhs.k = jf.at("k").get<double>();
            if (!(pc.rhs.k > -1.0)) throw ConfigError("f.k must be > -1");
        } else if (kind == "cosine-2pi") {
            pc.rhs.kind = RhsKind::CosineTwoPi;
        } else if (kind == "zero") {
            pc.rhs.kind = RhsKind::Zero;
        } else if (kind == "expr") {
            pc.rhs.kind = RhsKind::Expression;
            pc.rhs.components = jf.at("components").get<std::vector<std::string>>();
        } else {
            throw ConfigError("f.kind must be one of monomial, cosine-2pi, zero, expr");
        }

        if (j.contains("domain")) {
            const json& jd = j.at("domain");
            if (jd.is_string() && jd.get<std::string>() == "all") {
                pr.domain.all_space = true;
            } else if (jd.is_object()) {
                pr.domain.all_space = false;
                pr.domain.lower = read_vec(jd.at("lower"), pr.d, "domain.lower");
                pr.domain.upper = read_vec(jd.at("upper"), pr.d, "domain.upper");
            } else {
                throw ConfigError("domain: expected \"all\" or {lower, upper}");
            }
        }
        if (j.contains("m")) {
            pr.m = read_vec(j.at("m"), pr.d, "m");
            pc.m_from_user = true;
        }
        if (j.contains("K")) {
            pr.K = read_mat(j.at("K"), pr.d, "K");
            pc.K_from_user = true;
        }

        if (j.contains("solver")) {
            const json& js = j.at("solver");
            SolverConfig& sc = pc.solver;
            if (js.contains("eps")) sc.eps = js.at("eps").get<double>();
            if (js.contains("q")) sc.q = js.at("q").get<int>();
            if (js.contains("tol")) sc.tol = js.at("tol").get<double>();
            if (js.contains("max_iter")) sc.max_iter = js.at("max_iter").get<int>();
            if (js.contains("integrand")) {
                const std::string rep = js.at("integrand").get<std::string>();
                if (rep == "plain") sc.integrand = IntegrandRep::Plain;
                else if (rep == "weighted") sc.integrand = IntegrandRep::Weighted;
                else throw ConfigError("solver.integrand must be plain or weighted");
            }
            if (js.contains("knots")) {
                const json& jk = js.at("knots");
                const std::string kk = jk.at("kind").get<std::string>();
                if (kk == "uniform") {
                    sc.knots.kind = KnotKind::Uniform;
                    sc.knots.h = jk.at("h").get<double>();
                } else if (kk == "graded") {
                    sc.knots.kind = KnotKind::Graded;
                    sc.knots.c = jk.at("c").get<double>();
                    sc.knots.h_max = jk.at("h_max").get<double>();
                    if (!(sc.knots.c > 1.0)) throw ConfigError("knots.c must be > 1");
                } else if (kk == "explicit") {
                    sc.knots.kind = KnotKind::Explicit;
                    sc.knots.breakpoints = jk.at("breakpoints").get<std::vector<double>>();
                } else {
                    throw ConfigError("knots.kind must be uniform, graded or explicit");
                }
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    rebind_rhs(pc);
    refresh_registry_defaults(pc);
    try {
        pc.problem.validate();
        pc.solver.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!(pc.solver.eps < pc.problem.horizon)) throw ConfigError("config: need eps < T");
    if (pc.solver.knots.kind == KnotKind::Explicit) {
        const auto& bp = pc.solver.knots.breakpoints;
        if (bp.size() < 2 || bp.front() != pc.solver.eps || bp.back() != pc.problem.horizon)
            throw ConfigError("config: explicit breakpoints must run from eps to T");
    }
    return pc;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace fpbvp::config
