#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twinlab/optimizer.hpp"

namespace twinlab {

struct SweepRow {
    double eps = 0.0;
    double alpha = 0.0;
    double gamma = 0.0;
    std::string mode;  // "analytic-family" or "grid-solver"
    int n_used = 0;    // laminate layer count; 0 marks the affine winner
    double elastic = 0.0;
    double surface = 0.0;
    double load = 0.0;
    double total = 0.0;
    double wall_time_s = 0.0;
};

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
};

enum class SweepMode { AnalyticFamily, GridSolver };

struct SweepOptions {
    int grid_factor = 16;  // grid mode: N >= grid_factor * n_opt
    int grid_cap = 64;     // ... capped here
    SolverConfig solver;
};

/// One row per eps: family_search (analytic) or minimize (grid mode, with
/// N = min(cap, factor * n_opt) rounded up to even).
std::vector<SweepRow> sweep_eps(const BoundaryCondition& bc, double alpha,
                                const std::vector<double>& eps_list, SweepMode mode,
                                const SweepOptions& opts = {});

/// Least-squares fit of log(total) against log(eps). Rows with non-positive
/// totals are rejected; fewer than 4 usable rows is an error.
FitResult fit_exponent(const std::vector<SweepRow>& rows);
FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct GammaSweep {
    std::vector<SweepRow> rows;
    std::optional<double> gamma_star;  // smallest |gamma| where the laminate wins
};

/// Per gamma, evaluate the two analytic Neumann families (affine optimum
/// -(2/3) gamma^2 and the best laminate line) and record the winner. The
/// crossover is bisected to relative width 1e-3 and reported as the bracket
/// midpoint.
GammaSweep sweep_gamma(double eps, const std::vector<double>& gamma_list);

struct CrossoverResult {
    FitResult fit;                                 // log gamma* vs log eps
    std::vector<std::pair<double, double>> points; // (eps, gamma*)
};

CrossoverResult crossover_fit(const std::vector<double>& eps_list);

/// CSV with the fixed header; `comment` lines (already '#'-prefixed) go first.
void write_rows_csv(const std::string& path, const std::vector<SweepRow>& rows,
                    const std::vector<std::string>& comments = {});
std::string rows_csv_string(const std::vector<SweepRow>& rows,
                            const std::vector<std::string>& comments = {});

}  // namespace twinlab
