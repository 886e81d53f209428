#include "fpbvp/splines.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fpbvp {

std::size_t KnotCollection::locate(double t) const {
    if (t < breakpoints.front() || t > breakpoints.back())
        throw std::domain_error("KnotCollection::locate: t outside [eps, T]");
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    std::size_t i = static_cast<std::size_t>(it - breakpoints.begin());
    if (i == 0) return 0;
    --i;
    return std::min(i, count() - 1);
}

void KnotCollection::validate() const {
    if (breakpoints.size() < 2) throw std::invalid_argument("knot collection needs >= 2 breakpoints");
    if (!(breakpoints.front() > 0.0))
        throw std::invalid_argument("knot collection must start at eps > 0");
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        if (!(breakpoints[i] < breakpoints[i + 1]))
            throw std::invalid_argument("knot breakpoints must be strictly increasing");
}

namespace {

KnotCollection assemble(std::vector<double> bs, double horizon) {
    // clamp to the horizon and merge a degenerate final sliver
    if (bs.size() >= 2 && horizon - bs.back() < 1e-12 * horizon) bs.pop_back();
    bs.push_back(horizon);
    KnotCollection kc{std::move(bs)};
    kc.validate();
    return kc;
}

}  // namespace

KnotCollection uniform_knots(double eps, double horizon, double h) {
    if (!(eps > 0.0) || !(eps < horizon)) throw std::invalid_argument("uniform_knots: need 0 < eps < T");
    if (!(h > 0.0)) throw std::invalid_argument("uniform_knots: need h > 0");
    std::vector<double> bs{eps};
    while (bs.back() + h < horizon * (1.0 - 1e-12)) bs.push_back(bs.back() + h);
    return assemble(std::move(bs), horizon);
}

KnotCollection graded_knots(const GradedKnotParams& params, double gamma_exp) {
    if (!(params.c > 1.0)) throw std::invalid_argument("graded_knots: need c > 1");
    if (!(params.eps > 0.0) || !(params.eps < params.horizon))
        throw std::invalid_argument("graded_knots: need 0 < eps < T");
    if (!(params.h_max > 0.0)) throw std::invalid_argument("graded_knots: need h_max > 0");
    if (!(gamma_exp > 0.0) || gamma_exp > 1.0)
        throw std::invalid_argument("graded_knots: need 0 < gamma <= 1");
    const double grow =
        gamma_exp >= 1.0 ? 0.0 : std::pow(params.c, 1.0 / (1.0 - gamma_exp)) - 1.0;
    std::vector<double> bs{params.eps};
    while (true) {
        const double t = bs.back();
        const double h = gamma_exp >= 1.0 ? params.h_max : std::min(params.h_max, grow * t);
        const double next = t + h;
        if (next >= params.horizon * (1.0 - 1e-12)) break;
        bs.push_back(next);
    }
    return assemble(std::move(bs), params.horizon);
}

KnotCollection explicit_knots(std::vector<double> breakpoints) {
    KnotCollection kc{std::move(breakpoints)};
    kc.validate();
    return kc;
}

double bernstein_eval(std::span<const double> node_values, double a, double b, double t) {
    if (!(a < b)) throw std::domain_error("bernstein_eval: degenerate interval");
    if (t < a || t > b) throw std::domain_error("bernstein_eval: t outside [a, b]");
    const double lam = (t - a) / (b - a);
    std::vector<double> v(node_values.begin(), node_values.end());
    for (std::size_t r = v.size() - 1; r > 0; --r)
        for (std::size_t j = 0; j < r; ++j) v[j] = (1.0 - lam) * v[j] + lam * v[j + 1];
    return v[0];
}

std::vector<double> bernstein_fit(const std::function<double(double)>& f, double a, double b,
                                  int q) {
    if (q < 1) throw std::invalid_argument("bernstein_fit: order must be >= 1");
    std::vector<double> v(q + 1);
    for (int j = 0; j <= q; ++j) v[j] = f(j == q ? b : a + j * (b - a) / q);
    return v;
}

void local_power_coeffs(std::span<const double> node_values, std::span<double> out) {
    const std::size_t n = node_values.size();
    std::vector<double> diff(node_values.begin(), node_values.end());
    const int q = static_cast<int>(n) - 1;
    double binom = 1.0;  // C(q, r)
    out[0] = diff[0];
    for (int r = 1; r <= q; ++r) {
        for (int j = 0; j <= q - r; ++j) diff[j] = diff[j + 1] - diff[j];
        binom *= static_cast<double>(q - r + 1) / r;
        out[r] = binom * diff[0];
    }
}

void WeightedSpline::finalize() {
    power.assign(values.size(), 0.0);
    for (std::size_t i = 0; i < knots.count(); ++i)
        for (std::size_t c = 0; c < dim; ++c) {
            std::span<const double> v{values.data() + idx(i, c), static_cast<std::size_t>(q + 1)};
            std::span<double> p{power.data() + idx(i, c), static_cast<std::size_t>(q + 1)};
            local_power_coeffs(v, p);
        }
}

Vec WeightedSpline::weighted_part(double t) const {
    const std::size_t i = knots.locate(t);
    Vec out(dim);
    for (std::size_t c = 0; c < dim; ++c)
        out[c] = bernstein_eval(piece_values(i, c), knots.breakpoints[i], knots.breakpoints[i + 1], t);
    return out;
}

Vec WeightedSpline::eval(double t) const {
    Vec out = weighted_part(t);
    const double w = std::pow(t, gamma_exp - 1.0);
    for (double& v : out) v *= w;
    return out;
}

WeightedSpline spline_project(const std::function<Vec(double)>& w, const KnotCollection& knots,
                              int q, double gamma_exp, std::size_t dim) {
    if (q < 1) throw std::invalid_argument("spline_project: order must be >= 1");
    knots.validate();
    WeightedSpline ws;
    ws.knots = knots;
    ws.gamma_exp = gamma_exp;
    ws.q = q;
    ws.dim = dim;
    ws.values.assign(knots.count() * dim * (q + 1), 0.0);
    for (std::size_t i = 0; i < knots.count(); ++i)
        for (int j = 0; j <= q; ++j) {
            const Vec val = w(ws.node_t(i, j));
            if (val.size() != dim) throw std::invalid_argument("spline_project: dimension mismatch");
            for (std::size_t c = 0; c < dim; ++c) ws.values[ws.idx(i, c) + j] = val[c];
        }
    ws.finalize();
    return ws;
}

std::string spline_to_json(const WeightedSpline& ws) {
    nlohmann::json j;
    j["gamma"] = ws.gamma_exp;
    j["q"] = ws.q;
    j["dim"] = ws.dim;
    j["breakpoints"] = ws.knots.breakpoints;
    auto coeffs = nlohmann::json::array();
    for (std::size_t i = 0; i < ws.knots.count(); ++i) {
        auto per_comp = nlohmann::json::array();
        for (std::size_t c = 0; c < ws.dim; ++c) {
            auto vals = nlohmann::json::array();
            for (int n = 0; n <= ws.q; ++n) vals.push_back(ws.values[ws.idx(i, c) + n]);
            per_comp.push_back(vals);
        }
        coeffs.push_back(per_comp);
    }
    j["coefficients"] = coeffs;
    return j.dump(2);
}

WeightedSpline spline_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    WeightedSpline ws;
    ws.gamma_exp = j.at("gamma").get<double>();
    ws.q = j.at("q").get<int>();
    ws.dim = j.at("dim").get<std::size_t>();
    ws.knots.breakpoints = j.at("breakpoints").get<std::vector<double>>();
    ws.knots.validate();
    const auto& coeffs = j.at("coefficients");
    if (coeffs.size() != ws.knots.count())
        throw std::invalid_argument("spline_from_json: coefficient/interval count mismatch");
    ws.values.assign(ws.knots.count() * ws.dim * (ws.q + 1), 0.0);
    for (std::size_t i = 0; i < ws.knots.count(); ++i)
        for (std::size_t c = 0; c < ws.dim; ++c)
            for (int n = 0; n <= ws.q; ++n)
                ws.values[ws.idx(i, c) + n] = coeffs.at(i).at(c).at(n).get<double>();
    ws.finalize();
    return ws;
}

void spline_to_csv(const WeightedSpline& ws, std::ostream& os) {
    os << "interval,component,node,t,value\n";
    std::ostringstream num;
    num.precision(17);
    for (std::size_t i = 0; i < ws.knots.count(); ++i)
        for (std::size_t c = 0; c < ws.dim; ++c)
            for (int n = 0; n <= ws.q; ++n) {
                num.str("");
                num << ws.node_t(i, n) << "," << ws.values[ws.idx(i, c) + n];
                os << i << "," << c << "," << n << "," << num.str() << "\n";
            }
}

Vec weighted_eval(const WeightedSpline& ws, double t) { return ws.eval(t); }

}  // namespace fpbvp
