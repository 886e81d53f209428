#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fpbvp/problem.hpp"
#include "fpbvp/solver.hpp"

namespace fpbvp {

enum class SearchVariable { Horizon, X0Component };

/// Grid search for Delta_T(x0_tilde) = 0 over the horizon T or one component
/// of x0_tilde. Each grid point instantiates its own problem (graded knots
/// are regenerated per point) and runs a full perturbed-IVP solve.
struct GridSearchSpec {
    SearchVariable variable = SearchVariable::Horizon;
    std::size_t x0_index = 0;
    std::vector<double> values;  // strictly increasing
    ProblemSpec problem;         // template; T or x0 overridden per point
    SolverConfig config;
    int threads = 1;
    /// Called after the per-point mutation, e.g. to refresh certified m and K
    /// so the per-point assumption checks stay valid.
    std::function<void(ProblemSpec&, double)> customize;
};

struct GridPoint {
    double value = 0.0;
    Vec delta;
    double abs_delta = 0.0;  // max-norm of Delta_T
    bool converged = false;
    int iterations = 0;
    std::string note;
};

struct GridSearchResult {
    std::vector<GridPoint> table;
    std::size_t argmin_index = 0;
    double min_abs_delta = 0.0;
    bool boundary_warning = false;  // argmin on the grid edge
    double step = 0.0;              // spacing used (for refinement)
};

std::vector<double> make_grid(double start, double stop, double step);

/// Solves every grid point (in parallel when threads > 1; the table is
/// order-stable by grid index) and selects the converged argmin of |Delta_T|.
/// Throws if no point converges.
GridSearchResult grid_search(const GridSearchSpec& spec);

/// Re-grids around the argmin with step/factor and re-runs. A boundary argmin
/// extends the window one old step outward and sets boundary_warning.
GridSearchResult refine(const GridSearchSpec& spec, const GridSearchResult& result,
                        double factor);

void grid_result_to_csv(const GridSearchResult& r, std::ostream& os);

}  // namespace fpbvp
