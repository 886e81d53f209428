// End-to-end checks of the command-line tool: exit codes, file outputs and
// lossless CSV round trips, driven through the real binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpbvp/config.hpp"
#include "fpbvp/splines.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const fs::path out = fs::temp_directory_path() / "fpbvp_cli_out.txt";
    const std::string cmd = std::string(FPBVP_CLI_PATH) + " " + args + " > " + out.string() +
                            " 2>&1";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

fs::path write_temp(const std::string& name, const std::string& text) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream os(p);
    os << text;
    return p;
}

const char* kLinearCoarse = R"({
  "alpha": 0.5, "beta": 0.5, "T": 3.0, "x0_tilde": 1.0,
  "f": {"kind": "monomial", "k": 0.9},
  "solver": {"eps": 1e-10, "q": 1, "knots": {"kind": "uniform", "h": 0.125}}
})";

}  // namespace

TEST_CASE("check: nonlinear benchmark passes all assumptions") {
    const auto r = run_cli("check --config " + std::string(FPBVP_CONFIG_DIR) +
                           "/nonlinear_cosine.json");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("A.3*: pass") != std::string::npos);
    CHECK(r.output.find("Xi") != std::string::npos);
}

TEST_CASE("solve: writes solution, diagnostics, spline and plot files") {
    const fs::path cfg = write_temp("fpbvp_lin.json", kLinearCoarse);
    const fs::path out = fs::temp_directory_path() / "fpbvp_solve_out";
    fs::remove_all(out);
    const auto r = run_cli("solve --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(out / "solution.csv"));
    CHECK(fs::exists(out / "diagnostics.json"));
    CHECK(fs::exists(out / "spline.json"));
    CHECK(fs::exists(out / "plot.gp"));
    std::ifstream in(out / "diagnostics.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j.at("iterations").get<int>() == 2);
    CHECK(std::abs(j.at("delta_T")[0].get<double>() + 1.600) < 0.005);

    SUBCASE("dump-spline round trips the stored spline") {
        const auto d1 = run_cli("dump-spline --in " + (out / "spline.json").string() +
                                " --format csv");
        CHECK(d1.exit_code == 0);
        CHECK(d1.output.find("interval,component,node,t,value") == 0);
        const auto d2 = run_cli("--format json dump-spline --in " +
                                (out / "spline.json").string());
        CHECK(d2.exit_code == 0);
        const auto ws = fpbvp::spline_from_json(d2.output);
        std::ifstream sin(out / "spline.json");
        std::stringstream ss;
        ss << sin.rdbuf();
        const auto orig = fpbvp::spline_from_json(ss.str());
        CHECK(ws.values == orig.values);
    }
}

TEST_CASE("sweep: single value equals the solve diagnostics; CSV rereads losslessly") {
    const fs::path cfg = write_temp("fpbvp_lin.json", kLinearCoarse);
    const fs::path out = fs::temp_directory_path() / "fpbvp_sweep_out";
    fs::remove_all(out);
    const auto r =
        run_cli("sweep --config " + cfg.string() + " --param h --values 0.5 --out " + out.string());
    CHECK(r.exit_code == 0);
    std::ifstream in(out / "sweep_h.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header ==
          "param,value,knots,iterations,mean_weighted_error,sup_weighted_error,"
          "weighted_error_at_eps,delta_T,x_eps,total_time_s");
    // reread the row and confirm the doubles round-trip exactly
    std::stringstream ss(row);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 10);
    CHECK(cells[0] == "h");
    CHECK(std::stoul(cells[2]) == 6);   // knots at h = 0.5
    CHECK(std::stoi(cells[3]) == 2);    // one productive iteration past the initial
    const double sup = std::stod(cells[5]);
    CHECK(sup > 0.5 * 1.537e-1);
    CHECK(sup < 2.0 * 1.537e-1);        // reference row at h = 2^-1
    const double dt = std::stod(cells[7]);
    std::ostringstream rt;
    rt.precision(17);
    rt << dt;
    CHECK(rt.str() == cells[7]);
}

TEST_CASE("gridsearch: explicit values and refinement") {
    const fs::path out = fs::temp_directory_path() / "fpbvp_grid_out";
    fs::remove_all(out);
    const auto r = run_cli("gridsearch --config " + std::string(FPBVP_CONFIG_DIR) +
                           "/nonlinear_cosine.json --param T --values 0.18,0.19,0.2 --out " +
                           out.string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(out / "grid.csv"));
    CHECK(r.output.find("argmin T") != std::string::npos);
    std::ifstream in(out / "grid.csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);  // header + 3 grid points
}

TEST_CASE("exit codes: bad config and non-convergence") {
    const auto bad = run_cli("solve --config /nonexistent.json --out /tmp/fpbvp_x");
    CHECK(bad.exit_code == 1);

    const fs::path broken = write_temp("fpbvp_broken.json", "{\"alpha\": }");
    CHECK(run_cli("check --config " + broken.string()).exit_code == 1);

    const fs::path diverging = write_temp("fpbvp_diverging.json", R"({
      "alpha": 0.5, "beta": 0.5, "T": 3.0, "x0_tilde": 1.0,
      "f": {"kind": "expr", "components": ["50*x1"]},
      "solver": {"eps": 1e-10, "q": 1, "max_iter": 20,
                 "knots": {"kind": "uniform", "h": 0.5}}
    })");
    CHECK(run_cli("solve --config " + diverging.string() + " --out /tmp/fpbvp_x").exit_code == 2);
}

TEST_CASE("expression forcing through a config file matches the registry") {
    const fs::path expr_cfg = write_temp("fpbvp_expr.json", R"json({
      "alpha": 0.75, "beta": 1.0, "T": 0.5, "x0_tilde": 1.0,
      "f": {"kind": "expr", "components": ["cos(x1*4*pi*t)/(2*pi)"]},
      "m": 0.1592, "K": 1.0,
      "solver": {"eps": 1e-10, "q": 1, "knots": {"kind": "graded", "c": 1.5, "h_max": 0.01}}
    })json");
    const auto a = fpbvp::config::load_config(expr_cfg.string());
    const auto b = fpbvp::config::load_config(std::string(FPBVP_CONFIG_DIR) +
                                              "/nonlinear_cosine.json");
    for (double t : {0.1, 0.3}) {
        for (double xv : {0.5, 2.0}) {
            const double fa = a.problem.f(t, {xv})[0];
            const double fb = b.problem.f(t, {xv})[0];
            CHECK(fa == doctest::Approx(fb).epsilon(1e-15));
        }
    }
}
