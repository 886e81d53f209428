#include "fpbvp/shooting.hpp"

#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace fpbvp {

std::vector<double> make_grid(double start, double stop, double step) {
    if (!(step > 0.0) || stop < start) throw std::invalid_argument("make_grid: bad range");
    std::vector<double> g;
    for (int i = 0;; ++i) {
        const double v = start + i * step;
        if (v > stop * (1.0 + 1e-12)) break;
        g.push_back(std::min(v, stop));
    }
    if (g.empty()) throw std::invalid_argument("make_grid: empty grid");
    return g;
}

namespace {

GridPoint solve_point(const GridSearchSpec& spec, double value) {
    GridPoint pt;
    pt.value = value;
    ProblemSpec problem = spec.problem;
    if (spec.variable == SearchVariable::Horizon)
        problem.horizon = value;
    else
        problem.x0_tilde[spec.x0_index] = value;
    if (spec.customize) spec.customize(problem, value);
    try {
        const SolveResult r = solve_perturbed_ivp(problem, spec.config);
        pt.delta = r.delta_T;
        pt.abs_delta = max_abs(r.delta_T);
        pt.converged = true;
        pt.iterations = r.iterations;
        for (const auto& w : r.warnings) {
            if (!pt.note.empty()) pt.note += "; ";
            pt.note += w;
        }
    } catch (const std::exception& e) {
        pt.note = e.what();
    }
    return pt;
}

}  // namespace

GridSearchResult grid_search(const GridSearchSpec& spec) {
    if (spec.values.empty()) throw std::invalid_argument("grid_search: empty grid");
    for (std::size_t i = 1; i < spec.values.size(); ++i)
        if (!(spec.values[i] > spec.values[i - 1]))
            throw std::invalid_argument("grid_search: grid must be strictly increasing");

    GridSearchResult out;
    out.table.resize(spec.values.size());
    const int threads = std::max(1, spec.threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < spec.values.size(); ++i)
            out.table[i] = solve_point(spec, spec.values[i]);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= spec.values.size()) break;
                out.table[i] = solve_point(spec, spec.values[i]);
            }
        };
        std::vector<std::thread> pool;
        for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    bool found = false;
    for (std::size_t i = 0; i < out.table.size(); ++i) {
        if (!out.table[i].converged) continue;
        if (!found || out.table[i].abs_delta < out.min_abs_delta) {
            out.argmin_index = i;
            out.min_abs_delta = out.table[i].abs_delta;
            found = true;
        }
    }
    if (!found) throw std::runtime_error("grid_search: no grid point converged");
    out.boundary_warning = out.argmin_index == 0 || out.argmin_index + 1 == out.table.size();
    out.step = spec.values.size() > 1 ? spec.values[1] - spec.values[0] : 0.0;
    return out;
}

GridSearchResult refine(const GridSearchSpec& spec, const GridSearchResult& result,
                        double factor) {
    if (!(factor > 1.0)) throw std::invalid_argument("refine: factor must be > 1");
    const double center = result.table[result.argmin_index].value;
    double window = result.step > 0.0 ? result.step : std::abs(center) * 0.1;
    if (result.boundary_warning) window *= 2.0;  // extend past the edge
    double lo = center - window;
    if (spec.variable == SearchVariable::Horizon) lo = std::max(lo, spec.config.eps * 4.0);
    const double hi = center + window;
    GridSearchSpec fine = spec;
    fine.values = make_grid(lo, hi, (result.step > 0.0 ? result.step : window) / factor);
    return grid_search(fine);
}

void grid_result_to_csv(const GridSearchResult& r, std::ostream& os) {
    os << "value,abs_delta,converged,iterations";
    const std::size_t d = r.table.empty() || r.table[0].delta.empty() ? 1 : r.table[0].delta.size();
    for (std::size_t c = 0; c < d; ++c) os << ",delta" << c + 1;
    os << ",note\n";
    os.precision(17);
    for (const auto& p : r.table) {
        os << p.value << "," << p.abs_delta << "," << (p.converged ? 1 : 0) << ","
           << p.iterations;
        for (std::size_t c = 0; c < d; ++c) os << "," << (c < p.delta.size() ? p.delta[c] : 0.0);
        os << "," << p.note << "\n";
    }
}

}  // namespace fpbvp
