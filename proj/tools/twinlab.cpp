// twinlab: command-line laboratory for the two-variant twinning energy model.
// Subcommands: construct, minimize, sweep, certify. See README for the output
// layout; every artifact embeds the resolved run configuration.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "twinlab/dual.hpp"
#include "twinlab/optimizer.hpp"
#include "twinlab/scaling.hpp"
#include "twinlab/snapshot.hpp"
#include "twinlab/version.hpp"

using nlohmann::json;
using namespace twinlab;
namespace fs = std::filesystem;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << j.dump(2) << "\n";
}

json breakdown_json(const EnergyBreakdown& b) {
    return json{{"elastic", b.elastic},
                {"surface", b.surface},
                {"load", b.load},
                {"total", b.total},
                {"constraint_violation", b.constraint_violation}};
}

BoundaryCondition make_bc(const std::string& name, double alpha, double gamma, bool ansatz) {
    BoundaryCondition bc;
    if (name == "top-bottom")
        bc = BoundaryCondition::top_bottom();
    else if (name == "left-right")
        bc = BoundaryCondition::left_right(alpha);
    else if (name == "neumann")
        bc = BoundaryCondition::neumann(gamma);
    else
        throw CLI::ValidationError("--bc", "unknown boundary condition: " + name);
    bc.ansatz_constrained = ansatz;
    return bc;
}

struct ConstructArgs {
    std::string kind;
    double alpha = 1.0;
    double eps = 0.01;
    double t = 0.0;
    int n = 0;  // 0 = auto
    int N = 16;
    unsigned long rng_seed = 0;
    std::string out = "twinlab-out";
};

int run_construct(const ConstructArgs& a) {
    GridSpec grid(a.N);
    fs::create_directories(a.out);
    json cfg{{"command", "construct"}, {"kind", a.kind},   {"alpha", a.alpha},
             {"eps", a.eps},           {"t", a.t},         {"n", a.n},
             {"N", a.N},               {"rng_seed", a.rng_seed}, {"version", kVersion}};

    DisplacementField u(grid);
    SignField s(grid, +1);
    json analytic;

    if (a.kind == "ustar") {
        u = sample_u_star(grid, a.alpha);
        s = sign_of_e23(u);
        analytic["elastic_qc"] = 0.0;  // the relaxed energy vanishes for |alpha| <= 1
        analytic["m_prime"] = -8.0 * a.alpha / 3.0;
    } else if (a.kind == "laminate" || a.kind == "laminate-symmetric") {
        LaminateParams lp{a.alpha, a.n > 0 ? a.n : laminate_optimal_n(a.alpha, a.eps),
                          a.kind == "laminate-symmetric"};
        cfg["n"] = lp.n;
        auto [uu, ss] = sample_laminate(grid, lp);
        u = std::move(uu);
        s = std::move(ss);
        analytic = breakdown_json(analytic_energy_laminate(lp, a.eps));
        analytic["m_prime"] = laminate_m_prime(lp);
    } else if (a.kind == "affine-w") {
        u = sample_displacement(grid,
                                [&](const Point& x) { return affine_w(a.alpha, x); });
        analytic = breakdown_json(affine_w_energy(a.alpha, a.eps));
    } else if (a.kind == "neumann-affine") {
        u = sample_displacement(grid,
                                [&](const Point& x) { return neumann_affine_u(a.t, x); });
        analytic["elastic"] = neumann_affine_elastic(a.t);
        analytic["surface"] = 0.0;
        analytic["m_prime"] = neumann_affine_m_prime(a.t);
    } else {
        throw CLI::ValidationError("kind", "unknown construction: " + a.kind);
    }

    const auto bd = total_energy(u, s, a.eps, BoundaryCondition::neumann(0.0));
    json grid_side = breakdown_json(bd);
    grid_side["m_prime"] = m_prime(u);

    const std::string cfgline = "config " + cfg.dump();
    write_displacement((fs::path(a.out) / "u.field").string(), u, {cfgline});
    write_sign((fs::path(a.out) / "s.field").string(), s, {cfgline});
    write_json(fs::path(a.out) / "energy.json",
               json{{"config", cfg}, {"analytic", analytic}, {"grid", grid_side}});
    std::cout << "construct " << a.kind << ": grid total " << bd.total << " -> " << a.out
              << "\n";
    return 0;
}

struct MinimizeArgs {
    std::string bc = "top-bottom";
    double alpha = 1.0;
    double gamma = 0.0;
    double eps = 0.05;
    int N = 16;
    bool ansatz = false;
    bool strict = false;
    double cg_tol = 1e-8;
    long cg_max_iters = 0;
    int outer_max = 200;
    unsigned long rng_seed = 0;
    std::string out = "twinlab-out";
};

int run_minimize(const MinimizeArgs& a) {
    ProblemSpec problem(make_bc(a.bc, a.alpha, a.gamma, a.ansatz), a.eps, GridSpec(a.N));
    SolverConfig cfg;
    cfg.cg_rel_tol = a.cg_tol;
    cfg.cg_max_iters = a.cg_max_iters;
    cfg.outer_max = a.outer_max;
    cfg.rng_seed = a.rng_seed;

    json jcfg{{"command", "minimize"}, {"bc", a.bc},       {"alpha", a.alpha},
              {"gamma", a.gamma},      {"eps", a.eps},     {"N", a.N},
              {"ansatz", a.ansatz},    {"cg_tol", a.cg_tol}, {"cg_max_iters", a.cg_max_iters},
              {"outer_max", a.outer_max}, {"rng_seed", a.rng_seed}, {"version", kVersion}};

    const double t0 = now_s();
    SolveResult res = minimize(problem, cfg);
    const double wall = now_s() - t0;

    fs::create_directories(a.out);
    const std::string cfgline = "config " + jcfg.dump();
    write_displacement((fs::path(a.out) / "u.field").string(), res.u, {cfgline});
    write_sign((fs::path(a.out) / "s.field").string(), res.s, {cfgline});
    {
        std::ofstream os(fs::path(a.out) / "trace.csv");
        os << "# " << cfgline << "\niter,total\n";
        char buf[40];
        for (std::size_t i = 0; i < res.trace.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", res.trace[i]);
            os << i << "," << buf << "\n";
        }
    }
    write_json(fs::path(a.out) / "summary.json",
               json{{"config", jcfg},
                    {"energy", breakdown_json(res.energy)},
                    {"converged", res.converged},
                    {"outer_iterations", res.trace.empty() ? 0 : res.trace.size() - 1},
                    {"wall_time_s", wall}});
    std::cout << "minimize: total " << res.energy.total
              << (res.converged ? "" : " (not converged)") << " -> " << a.out << "\n";
    if (a.strict && !res.converged) return 2;
    return 0;
}

struct SweepArgs {
    std::string kind;
    std::string bc = "top-bottom";
    double alpha = 1.0;
    double from = 1e-5;
    double to = 1e-2;
    int points = 7;
    double eps = 1e-3;
    double gamma_max = 2.0;
    std::string eps_list;
    std::string mode = "analytic";
    unsigned long rng_seed = 0;
    std::string out = "twinlab-out";
};

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> v;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    return v;
}

int run_sweep(const SweepArgs& a) {
    fs::create_directories(a.out);
    json jcfg{{"command", "sweep"},   {"kind", a.kind},     {"bc", a.bc},
              {"alpha", a.alpha},     {"from", a.from},     {"to", a.to},
              {"points", a.points},   {"eps", a.eps},       {"gamma_max", a.gamma_max},
              {"eps_list", a.eps_list}, {"mode", a.mode},   {"rng_seed", a.rng_seed},
              {"version", kVersion}};
    const std::string comment = "# config " + jcfg.dump();

    if (a.kind == "eps") {
        std::vector<double> eps_list;
        for (int i = 0; i < a.points; ++i)
            eps_list.push_back(a.from *
                               std::pow(a.to / a.from, static_cast<double>(i) / (a.points - 1)));
        const SweepMode mode =
            a.mode == "grid" ? SweepMode::GridSolver : SweepMode::AnalyticFamily;
        auto rows = sweep_eps(make_bc(a.bc, a.alpha, 0.0, false), a.alpha, eps_list, mode);
        write_rows_csv((fs::path(a.out) / "rows.csv").string(), rows, {comment});
        try {
            FitResult fit = fit_exponent(rows);
            write_json(fs::path(a.out) / "fit.json",
                       json{{"config", jcfg},
                            {"slope", fit.slope},
                            {"intercept", fit.intercept},
                            {"r2", fit.r_squared},
                            {"n_points", fit.n_points}});
            std::cout << "sweep eps: slope " << fit.slope << " r2 " << fit.r_squared << " -> "
                      << a.out << "\n";
        } catch (const std::invalid_argument& e) {
            // too few usable rows for an exponent fit: keep the sweep data,
            // report the fit as unavailable
            write_json(fs::path(a.out) / "fit.json", json{{"config", jcfg}, {"error", e.what()}});
            std::cout << "sweep eps: no fit (" << e.what() << ") -> " << a.out << "\n";
        }
        return 0;
    }
    if (a.kind == "gamma") {
        std::vector<double> gammas;
        for (int i = -a.points; i <= a.points; ++i)
            gammas.push_back(a.gamma_max * i / a.points);
        GammaSweep sweep = sweep_gamma(a.eps, gammas);
        write_rows_csv((fs::path(a.out) / "rows.csv").string(), sweep.rows, {comment});
        json j{{"config", jcfg}, {"eps", a.eps}};
        if (sweep.gamma_star)
            j["gamma_star"] = *sweep.gamma_star;
        else
            j["gamma_star"] = nullptr;
        write_json(fs::path(a.out) / "gamma_star.json", j);
        std::cout << "sweep gamma: gamma_star "
                  << (sweep.gamma_star ? std::to_string(*sweep.gamma_star) : "none") << " -> "
                  << a.out << "\n";
        return 0;
    }
    if (a.kind == "crossover") {
        const std::vector<double> eps_list = parse_list(a.eps_list);
        CrossoverResult res = crossover_fit(eps_list);
        {
            std::ofstream os(fs::path(a.out) / "crossover.csv");
            os << comment << "\neps,gamma_star\n";
            char buf[40];
            for (const auto& [e, g] : res.points) {
                std::snprintf(buf, sizeof buf, "%.17g", e);
                os << buf << ",";
                std::snprintf(buf, sizeof buf, "%.17g", g);
                os << buf << "\n";
            }
        }
        write_json(fs::path(a.out) / "fit.json",
                   json{{"config", jcfg},
                        {"slope", res.fit.slope},
                        {"intercept", res.fit.intercept},
                        {"r2", res.fit.r_squared},
                        {"n_points", res.fit.n_points}});
        std::cout << "sweep crossover: slope " << res.fit.slope << " -> " << a.out << "\n";
        return 0;
    }
    throw CLI::ValidationError("kind", "unknown sweep kind: " + a.kind);
}

struct CertifyArgs {
    std::string snapshot;
    std::string out;
};

int run_certify(const CertifyArgs& a) {
    DisplacementField u = read_displacement(a.snapshot);
    json jcfg{{"command", "certify"}, {"snapshot", a.snapshot}, {"version", kVersion}};
    BestSliceResult best = best_slice_bound(u);  // throws if the BC check fails
    const SignField s = sign_of_e23(u);
    const double elastic = elastic_energy(u, &s, EnergyModel::TwoWellQuadratic);
    json report{{"config", jcfg},
                {"bound", best.bound},
                {"x1_star", best.x1_star},
                {"lambda", best.lambda},
                {"tol", best.tol},
                {"elastic_twowell", elastic}};
    std::cout << report.dump(2) << "\n";
    if (!a.out.empty()) {
        fs::create_directories(a.out);
        write_json(fs::path(a.out) / "certificate.json", report);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"twinlab: energy laboratory for twinning with variable volume fraction"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI/TOML file");
    int threads = 0;
    app.add_option("--threads", threads, "cap on worker threads")->envname("TWINLAB_THREADS");

    ConstructArgs ca;
    CLI::App* construct = app.add_subcommand("construct", "sample a closed-form microstructure");
    construct->add_option("kind", ca.kind,
                          "ustar | laminate | laminate-symmetric | affine-w | neumann-affine")
        ->required();
    construct->add_option("--alpha", ca.alpha, "bending amplitude in [-1,1]")
        ->check(CLI::Range(-1.0, 1.0));
    construct->add_option("--eps", ca.eps, "surface energy weight")->check(CLI::PositiveNumber);
    construct->add_option("--n", ca.n, "laminate layers (0 = ceil((alpha^2/eps)^(1/3)))");
    construct->add_option("--t", ca.t, "parameter of the Neumann affine family");
    construct->add_option("--N", ca.N, "grid cells per axis")->check(CLI::Range(2, 512));
    construct->add_option("--rng-seed", ca.rng_seed, "recorded for reproducibility");
    construct->add_option("--out", ca.out, "output directory");

    MinimizeArgs ma;
    CLI::App* minimize_cmd = app.add_subcommand("minimize", "alternating discrete minimization");
    minimize_cmd->add_option("--bc", ma.bc, "top-bottom | left-right | neumann")->required();
    minimize_cmd->add_option("--alpha", ma.alpha, "left-right bending amplitude");
    minimize_cmd->add_option("--gamma", ma.gamma, "Neumann load strength");
    minimize_cmd->add_option("--eps", ma.eps, "surface energy weight")->check(CLI::PositiveNumber);
    minimize_cmd->add_option("--N", ma.N, "grid cells per axis")->check(CLI::Range(2, 512));
    minimize_cmd->add_flag("--ansatz", ma.ansatz, "restrict sign fields to x2-invariant ones");
    minimize_cmd->add_flag("--strict", ma.strict, "exit 2 when the solver does not converge");
    minimize_cmd->add_option("--cg-tol", ma.cg_tol, "CG relative tolerance");
    minimize_cmd->add_option("--cg-max-iters", ma.cg_max_iters, "CG iteration cap (0 = 10 N^3)");
    minimize_cmd->add_option("--outer-max", ma.outer_max, "outer iteration cap");
    minimize_cmd->add_option("--rng-seed", ma.rng_seed, "recorded for reproducibility");
    minimize_cmd->add_option("--out", ma.out, "output directory");

    SweepArgs sa;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "parameter sweeps and scaling fits");
    sweep_cmd->add_option("kind", sa.kind, "eps | gamma | crossover")->required();
    sweep_cmd->add_option("--bc", sa.bc, "top-bottom | left-right");
    sweep_cmd->add_option("--alpha", sa.alpha, "left-right bending amplitude");
    sweep_cmd->add_option("--from", sa.from, "smallest eps")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--to", sa.to, "largest eps")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--points", sa.points, "sweep points")->check(CLI::Range(2, 1000));
    sweep_cmd->add_option("--eps", sa.eps, "eps for the gamma sweep")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--gamma-max", sa.gamma_max, "gamma range half-width");
    sweep_cmd->add_option("--eps-list", sa.eps_list, "comma-separated eps values (crossover)");
    sweep_cmd->add_option("--mode", sa.mode, "analytic | grid");
    sweep_cmd->add_option("--rng-seed", sa.rng_seed, "recorded for reproducibility");
    sweep_cmd->add_option("--out", sa.out, "output directory");

    CertifyArgs ta;
    CLI::App* certify_cmd =
        app.add_subcommand("certify", "duality lower-bound certificate for a snapshot");
    certify_cmd->add_option("snapshot", ta.snapshot, "displacement snapshot path")->required();
    certify_cmd->add_option("--out", ta.out, "optional output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // 1 for every usage error, 0 for --help
    }

    if (threads > 0) setenv("TWINLAB_THREADS", std::to_string(threads).c_str(), 1);

    try {
        if (*construct) return run_construct(ca);
        if (*minimize_cmd) return run_minimize(ma);
        if (*sweep_cmd) return run_sweep(sa);
        if (*certify_cmd) return run_certify(ta);
    } catch (const std::exception& e) {
        std::cerr << "twinlab: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
