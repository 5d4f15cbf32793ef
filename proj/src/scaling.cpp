#include "twinlab/scaling.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twinlab {

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double bc_alpha(const BoundaryCondition& bc) {
    switch (bc.kind) {
        case BoundaryCondition::Kind::TopBottom: return 1.0;
        case BoundaryCondition::Kind::LeftRight: return bc.alpha;
        default: return 0.0;
    }
}

// best analytic laminate objective at |alpha| = 1 for the Neumann competition
struct LaminateLine {
    double energy;  // E_eps of the best laminate (elastic + eps * surface)
    int n;
    bool symmetric;
};

LaminateLine best_laminate_line(double eps) {
    LaminateLine best{kInfiniteEnergy, 1, true};
    const int n_opt = laminate_optimal_n(1.0, eps);
    for (bool sym : {true, false})
        for (int n = 1; n <= 4 * n_opt; ++n) {
            const EnergyBreakdown e = analytic_energy_laminate({1.0, n, sym}, eps);
            if (e.total < best.energy) best = {e.total, n, sym};
        }
    return best;
}

}  // namespace

std::vector<SweepRow> sweep_eps(const BoundaryCondition& bc, double alpha,
                                const std::vector<double>& eps_list, SweepMode mode,
                                const SweepOptions& opts) {
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0)) throw std::invalid_argument("sweep_eps: eps must be > 0");
        if (i > 0 && eps_list[i] < eps_list[i - 1])
            throw std::invalid_argument("sweep_eps: eps_list must be sorted ascending");
    }
    BoundaryCondition run_bc = bc;
    if (bc.kind == BoundaryCondition::Kind::LeftRight) run_bc = BoundaryCondition::left_right(alpha);

    std::vector<SweepRow> rows;
    rows.reserve(eps_list.size());
    for (double eps : eps_list) {
        SweepRow row;
        row.eps = eps;
        row.alpha = bc_alpha(run_bc);
        row.gamma = run_bc.gamma;
        const double t0 = now_seconds();
        if (mode == SweepMode::AnalyticFamily) {
            // a 2-cell grid keeps the sampling cost of the winner negligible
            ProblemSpec p(run_bc, eps, GridSpec(2));
            FamilyResult fr = family_search(p);
            row.mode = "analytic-family";
            row.n_used = fr.winner == "laminate" ? fr.params.n : 0;
            row.elastic = fr.energy.elastic;
            row.surface = fr.energy.surface;
            row.load = fr.energy.load;
            row.total = fr.energy.total;
        } else {
            const int n_opt = laminate_optimal_n(row.alpha == 0.0 ? 1.0 : row.alpha, eps);
            int N = std::min(opts.grid_cap, opts.grid_factor * n_opt);
            if (N % 2) ++N;
            ProblemSpec p(run_bc, eps, GridSpec(std::max(4, N)));
            SolveResult res = minimize(p, opts.solver);
            row.mode = "grid-solver";
            row.n_used = n_opt;
            row.elastic = res.energy.elastic;
            row.surface = res.energy.surface;
            row.load = res.energy.load;
            row.total = res.energy.total;
        }
        row.wall_time_s = now_seconds() - t0;
        rows.push_back(row);
    }
    return rows;
}

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 4)
        throw std::invalid_argument("fit_loglog: need at least 4 points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_loglog: all values must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_loglog: degenerate abscissa");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.n_points = static_cast<int>(n);
    if (syy == 0.0) {
        fit.r_squared = 1.0;  // constant data, fitted exactly
    } else {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
            ss_res += e * e;
        }
        fit.r_squared = 1.0 - ss_res / syy;
    }
    return fit;
}

FitResult fit_exponent(const std::vector<SweepRow>& rows) {
    std::vector<double> x, y;
    std::size_t rejected = 0;
    for (const SweepRow& r : rows) {
        if (r.total > 0.0) {
            x.push_back(r.eps);
            y.push_back(r.total);
        } else {
            ++rejected;
        }
    }
    if (x.size() < 4) {
        std::ostringstream msg;
        msg << "fit_exponent: " << x.size() << " usable rows (" << rejected
            << " rejected as non-positive); need >= 4";
        throw std::invalid_argument(msg.str());
    }
    return fit_loglog(x, y);
}

GammaSweep sweep_gamma(double eps, const std::vector<double>& gamma_list) {
    if (!(eps > 0.0)) throw std::invalid_argument("sweep_gamma: eps must be > 0");
    const LaminateLine line = best_laminate_line(eps);

    auto laminate_objective = [&](double gamma) { return line.energy - (8.0 / 3.0) * std::abs(gamma); };
    auto laminate_wins = [&](double gamma) {
        return laminate_objective(gamma) < neumann_affine_objective(gamma);
    };

    GammaSweep out;
    out.rows.reserve(gamma_list.size());
    for (double gamma : gamma_list) {
        SweepRow row;
        row.eps = eps;
        row.gamma = gamma;
        row.mode = "analytic-family";
        const double start = now_seconds();
        if (laminate_wins(gamma)) {
            const double alpha = gamma >= 0.0 ? -1.0 : 1.0;
            const EnergyBreakdown e = analytic_energy_laminate({alpha, line.n, line.symmetric}, eps);
            row.alpha = alpha;
            row.n_used = line.n;
            row.elastic = e.elastic;
            row.surface = e.surface;
            row.load = -(8.0 / 3.0) * std::abs(gamma);
            row.total = e.elastic + eps * e.surface + row.load;
        } else {
            const double t = neumann_affine_best_t(gamma);
            row.alpha = 0.0;
            row.n_used = 0;
            row.elastic = neumann_affine_elastic(t);
            row.surface = 0.0;
            row.load = -gamma * neumann_affine_m_prime(t);
            row.total = row.elastic + row.load;
        }
        row.wall_time_s = now_seconds() - start;
        out.rows.push_back(row);
    }

    // smallest |gamma| at which the laminate family wins, refined by bisection
    double hi = kInfiniteEnergy;
    double lo = 0.0;
    for (const SweepRow& r : out.rows) {
        const double a = std::abs(r.gamma);
        if (r.n_used > 0) {
            if (a < hi) hi = a;
        }
    }
    for (const SweepRow& r : out.rows) {
        const double a = std::abs(r.gamma);
        if (r.n_used == 0 && a < hi && a > lo) lo = a;
    }
    if (std::isfinite(hi)) {
        while (hi - lo > 1e-3 * hi) {
            const double mid = 0.5 * (lo + hi);
            if (laminate_wins(mid))
                hi = mid;
            else
                lo = mid;
        }
        out.gamma_star = 0.5 * (lo + hi);
    }
    return out;
}

CrossoverResult crossover_fit(const std::vector<double>& eps_list) {
    if (eps_list.size() < 4)
        throw std::invalid_argument("crossover_fit: need at least 4 eps values");
    std::vector<double> gamma_list;
    for (int i = 0; i <= 40; ++i)
        gamma_list.push_back(1e-4 * std::pow(2.0 / 1e-4, i / 40.0));

    CrossoverResult out;
    std::vector<double> xs, ys;
    for (double eps : eps_list) {
        GammaSweep sweep = sweep_gamma(eps, gamma_list);
        if (!sweep.gamma_star)
            throw std::runtime_error("crossover_fit: no crossover found for eps in sweep range");
        out.points.emplace_back(eps, *sweep.gamma_star);
        xs.push_back(eps);
        ys.push_back(*sweep.gamma_star);
    }
    out.fit = fit_loglog(xs, ys);
    return out;
}

std::string rows_csv_string(const std::vector<SweepRow>& rows,
                            const std::vector<std::string>& comments) {
    std::ostringstream os;
    for (const auto& c : comments) os << c << "\n";
    os << "eps,alpha,gamma,mode,n_used,elastic,surface,load,total,wall_time_s\n";
    char buf[64];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << sep;
    };
    for (const SweepRow& r : rows) {
        put(r.eps, ',');
        put(r.alpha, ',');
        put(r.gamma, ',');
        os << r.mode << ',' << r.n_used << ',';
        put(r.elastic, ',');
        put(r.surface, ',');
        put(r.load, ',');
        put(r.total, ',');
        std::snprintf(buf, sizeof buf, "%.3f", r.wall_time_s);
        os << buf << "\n";
    }
    return os.str();
}

void write_rows_csv(const std::string& path, const std::vector<SweepRow>& rows,
                    const std::vector<std::string>& comments) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << rows_csv_string(rows, comments);
    if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace twinlab
