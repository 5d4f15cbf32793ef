#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "twinlab/scaling.hpp"

using namespace twinlab;

namespace {

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i)
        v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return v;
}

double best_laminate_total(double eps) {
    double best = kInfiniteEnergy;
    for (bool sym : {true, false})
        for (int n = 1; n <= 4 * laminate_optimal_n(1.0, eps); ++n)
            best = std::min(best, analytic_energy_laminate({1.0, n, sym}, eps).total);
    return best;
}

}  // namespace

TEST_CASE("fit_exponent: exact power law, constants, rejection") {
    std::vector<SweepRow> rows;
    for (double eps : log_spaced(1e-5, 1e-2, 6)) {
        SweepRow r;
        r.eps = eps;
        r.total = 3.7 * std::pow(eps, 2.0 / 3.0);
        rows.push_back(r);
    }
    FitResult fit = fit_exponent(rows);
    CHECK(fit.slope == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(fit.r_squared >= 1.0 - 1e-12);
    CHECK(fit.n_points == 6);

    for (auto& r : rows) r.total = 2.5;  // constant rows
    FitResult flat = fit_exponent(rows);
    CHECK(std::abs(flat.slope) <= 1e-12);

    for (auto& r : rows) r.total = 0.0;  // degenerate rows are rejected with a report
    CHECK_THROWS_WITH_AS(fit_exponent(rows),
                         doctest::Contains("rejected as non-positive"), std::invalid_argument);
    CHECK_THROWS_AS(fit_loglog({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("sweep_eps: top/bottom analytic halvings decay like 2^(2/3)") {
    std::vector<double> eps_list;
    for (int i = 8; i >= 0; --i) eps_list.push_back(1e-2 / std::pow(2.0, i));
    auto rows = sweep_eps(BoundaryCondition::top_bottom(), 1.0, eps_list,
                          SweepMode::AnalyticFamily);
    REQUIRE(rows.size() == 9);
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const double ratio = rows[i + 1].total / rows[i].total;
        CHECK(ratio >= 1.55);
        CHECK(ratio <= 1.63);
        CHECK(rows[i].total <= rows[i + 1].total);  // monotone in eps
    }
    FitResult fit = fit_exponent(rows);
    CHECK(fit.slope == doctest::Approx(2.0 / 3.0).epsilon(0.075));
    CHECK(fit.r_squared >= 0.99);
    for (const auto& r : rows) CHECK(r.mode == "analytic-family");
}

TEST_CASE("sweep_eps: zero bending costs nothing; small bending is purely elastic") {
    auto rows0 = sweep_eps(BoundaryCondition::left_right(0.0), 0.0, {1e-3, 1e-2, 1e-1},
                           SweepMode::AnalyticFamily);
    for (const auto& r : rows0) CHECK(r.total == 0.0);
    CHECK_THROWS_AS(fit_exponent(rows0), std::invalid_argument);

    // alpha^2 <= eps: the affine map wins with total 8 alpha^2 / 3 <= 8 alpha^2
    const double alpha = 0.1;
    auto rows = sweep_eps(BoundaryCondition::left_right(alpha), alpha, {0.01, 0.02, 0.1},
                          SweepMode::AnalyticFamily);
    for (const auto& r : rows) {
        CHECK(r.n_used == 0);
        CHECK(r.total == doctest::Approx(8.0 * alpha * alpha / 3.0).epsilon(1e-14));
        CHECK(r.total <= 8.0 * alpha * alpha);
    }
}

TEST_CASE("sweep_eps: grid mode stays within range of the analytic family") {
    SweepOptions opts;
    opts.grid_factor = 8;
    opts.grid_cap = 16;
    const std::vector<double> eps_list{0.05, 0.1};
    auto grid = sweep_eps(BoundaryCondition::top_bottom(), 1.0, eps_list, SweepMode::GridSolver,
                          opts);
    auto fam = sweep_eps(BoundaryCondition::top_bottom(), 1.0, eps_list,
                         SweepMode::AnalyticFamily);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(grid[i].mode == "grid-solver");
        CHECK(grid[i].total >= 0.5 * fam[i].total);
        CHECK(grid[i].total <= 2.0 * fam[i].total);
    }
}

TEST_CASE("sweep_eps input validation") {
    CHECK_THROWS_AS(sweep_eps(BoundaryCondition::top_bottom(), 1.0, {1e-2, 1e-3},
                              SweepMode::AnalyticFamily),
                    std::invalid_argument);  // unsorted
    CHECK_THROWS_AS(sweep_eps(BoundaryCondition::top_bottom(), 1.0, {0.0, 1e-3},
                              SweepMode::AnalyticFamily),
                    std::invalid_argument);
}

TEST_CASE("sweep_gamma: winner map, exact curve, crossover location") {
    const double eps = 1e-3;
    std::vector<double> gammas;
    for (double g = -1.0; g <= 1.0001; g += 0.05) gammas.push_back(g);
    GammaSweep sweep = sweep_gamma(eps, gammas);
    REQUIRE(sweep.rows.size() == gammas.size());

    const double lbest = best_laminate_total(eps);
    bool seen_laminate_pos = false, seen_laminate_neg = false;
    for (const auto& r : sweep.rows) {
        const double affine = neumann_affine_objective(r.gamma);
        const double lamline = lbest - (8.0 / 3.0) * std::abs(r.gamma);
        CHECK(r.total == doctest::Approx(std::min(affine, lamline)).epsilon(1e-12));
        // winner map monotone in |gamma| on each side
        if (r.gamma > 0) {
            if (r.n_used > 0) seen_laminate_pos = true;
            if (seen_laminate_pos) CHECK(r.n_used > 0);
        }
        if (r.gamma == 0.0) CHECK(r.n_used == 0);
    }
    for (auto it = sweep.rows.rbegin(); it != sweep.rows.rend(); ++it) {
        if (it->gamma < 0) {
            if (it->n_used > 0) seen_laminate_neg = true;
            if (seen_laminate_neg) CHECK(it->n_used > 0);
        }
    }
    CHECK(seen_laminate_pos);
    CHECK(seen_laminate_neg);

    // closed-form crossover: smaller root of (2/3) g^2 - (8/3) g + lbest = 0
    REQUIRE(sweep.gamma_star.has_value());
    const double root = (8.0 / 3.0 - std::sqrt(64.0 / 9.0 - 4.0 * (2.0 / 3.0) * lbest)) /
                        (2.0 * 2.0 / 3.0);
    CHECK(*sweep.gamma_star == doctest::Approx(root).epsilon(2e-3));
}

TEST_CASE("sweep_gamma: no crossover when the laminate line never wins") {
    GammaSweep sweep = sweep_gamma(0.5, {-0.5, 0.0, 0.5});  // eps too large in this range
    CHECK(!sweep.gamma_star.has_value());
    for (const auto& r : sweep.rows) CHECK(r.n_used == 0);
}

TEST_CASE("crossover_fit reproduces the 2/3 exponent") {
    CrossoverResult res = crossover_fit({1e-4, 3e-4, 1e-3, 3e-3, 1e-2});
    CHECK(res.fit.slope == doctest::Approx(2.0 / 3.0).epsilon(0.15));
    CHECK(res.fit.slope >= 0.567);
    CHECK(res.fit.slope <= 0.767);
    CHECK(res.points.size() == 5);
    // gamma* grows with eps
    for (std::size_t i = 1; i < res.points.size(); ++i)
        CHECK(res.points[i].second > res.points[i - 1].second);
    CHECK_THROWS_AS(crossover_fit({1e-3}), std::invalid_argument);
}

TEST_CASE("csv output carries the fixed schema") {
    SweepRow r;
    r.eps = 1e-3;
    r.mode = "analytic-family";
    r.total = 0.125;
    const std::string csv = rows_csv_string({r}, {"# config {\"x\":1}"});
    CHECK(csv.find("# config") == 0);
    CHECK(csv.find("eps,alpha,gamma,mode,n_used,elastic,surface,load,total,wall_time_s\n") !=
          std::string::npos);
    CHECK(csv.find("0.001,0,0,analytic-family,0,0,0,0,0.125,") != std::string::npos);
}
