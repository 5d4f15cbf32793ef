#include "twinlab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "twinlab/parallel.hpp"

namespace twinlab {

namespace {

inline int corner_index(int a, int b, int d) { return 4 * a + 2 * b + d; }

// Trilinear-element gradient operator for the homogeneous quadratic density
// e11^2+e22^2+e33^2+2e12^2+2e13^2+2e23^2, integrated with 2x2x2 Gauss points
// (exact). Ke maps element displacements to the element energy gradient.
struct ElasticOperator {
    GridSpec g;
    int threads;
    double Ke[24][24];
    std::vector<double> cellbuf;  // num_cells x 24

    ElasticOperator(GridSpec grid, int nthreads) : g(grid), threads(nthreads) {
        build_element_matrix();
        cellbuf.assign(g.num_cells() * 24, 0.0);
    }

    void build_element_matrix() {
        const double h = g.h;
        double K[24][24];
        std::memset(K, 0, sizeof K);
        const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
        const double C[6] = {1.0, 1.0, 1.0, 2.0, 2.0, 2.0};
        for (double gx : gp)
            for (double gy : gp)
                for (double gz : gp) {
                    double dN[8][3];
                    for (int a = 0; a <= 1; ++a)
                        for (int b = 0; b <= 1; ++b)
                            for (int d = 0; d <= 1; ++d) {
                                const int ci = corner_index(a, b, d);
                                const double Na = a ? gx : 1.0 - gx;
                                const double Nb = b ? gy : 1.0 - gy;
                                const double Nd = d ? gz : 1.0 - gz;
                                dN[ci][0] = (2 * a - 1) * Nb * Nd / h;
                                dN[ci][1] = Na * (2 * b - 1) * Nd / h;
                                dN[ci][2] = Na * Nb * (2 * d - 1) / h;
                            }
                    double B[6][24];
                    std::memset(B, 0, sizeof B);
                    for (int ci = 0; ci < 8; ++ci) {
                        const int c0 = 3 * ci, c1 = 3 * ci + 1, c2 = 3 * ci + 2;
                        B[0][c0] = dN[ci][0];
                        B[3][c0] = 0.5 * dN[ci][1];
                        B[4][c0] = 0.5 * dN[ci][2];
                        B[1][c1] = dN[ci][1];
                        B[3][c1] = 0.5 * dN[ci][0];
                        B[5][c1] = 0.5 * dN[ci][2];
                        B[2][c2] = dN[ci][2];
                        B[4][c2] = 0.5 * dN[ci][0];
                        B[5][c2] = 0.5 * dN[ci][1];
                    }
                    const double w = h * h * h / 8.0;
                    for (int p = 0; p < 24; ++p)
                        for (int q = p; q < 24; ++q) {
                            double acc = 0.0;
                            for (int r = 0; r < 6; ++r) acc += C[r] * B[r][p] * B[r][q];
                            K[p][q] += w * acc;
                        }
                }
        for (int p = 0; p < 24; ++p)
            for (int q = 0; q < 24; ++q) {
                const double v = p <= q ? K[p][q] : K[q][p];
                Ke[p][q] = 2.0 * v;  // energy form -> gradient operator
            }
    }

    // y = L x, two race-free passes (per-cell products, per-vertex gather).
    void apply(const std::vector<double>& x, std::vector<double>& y) {
        const int N = g.N;
        const std::size_t ncells = g.num_cells();
        parallel_for(ncells, [&](std::size_t cb, std::size_t ce) {
            double xloc[24], yloc[24];
            for (std::size_t c = cb; c < ce; ++c) {
                const int ci = static_cast<int>(c / (static_cast<std::size_t>(N) * N));
                const int cj = static_cast<int>((c / N) % N);
                const int ck = static_cast<int>(c % N);
                for (int a = 0; a <= 1; ++a)
                    for (int b = 0; b <= 1; ++b)
                        for (int d = 0; d <= 1; ++d) {
                            const std::size_t v = 3 * g.vidx(ci + a, cj + b, ck + d);
                            const int lc = 3 * corner_index(a, b, d);
                            xloc[lc] = x[v];
                            xloc[lc + 1] = x[v + 1];
                            xloc[lc + 2] = x[v + 2];
                        }
                for (int p = 0; p < 24; ++p) {
                    double acc = 0.0;
                    for (int q = 0; q < 24; ++q) acc += Ke[p][q] * xloc[q];
                    yloc[p] = acc;
                }
                std::memcpy(&cellbuf[c * 24], yloc, sizeof yloc);
            }
        }, threads);
        const std::size_t nverts = g.num_vertices();
        parallel_for(nverts, [&](std::size_t vb, std::size_t ve) {
            for (std::size_t v = vb; v < ve; ++v) {
                const int i = static_cast<int>(v / (static_cast<std::size_t>(N + 1) * (N + 1)));
                const int j = static_cast<int>((v / (N + 1)) % (N + 1));
                const int k = static_cast<int>(v % (N + 1));
                double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0;
                for (int a = 0; a <= 1; ++a) {
                    const int ci = i - a;
                    if (ci < 0 || ci >= N) continue;
                    for (int b = 0; b <= 1; ++b) {
                        const int cj = j - b;
                        if (cj < 0 || cj >= N) continue;
                        for (int d = 0; d <= 1; ++d) {
                            const int ck = k - d;
                            if (ck < 0 || ck >= N) continue;
                            const double* yc = &cellbuf[g.cidx(ci, cj, ck) * 24];
                            const int lc = 3 * corner_index(a, b, d);
                            acc0 += yc[lc];
                            acc1 += yc[lc + 1];
                            acc2 += yc[lc + 2];
                        }
                    }
                }
                y[3 * v] = acc0;
                y[3 * v + 1] = acc1;
                y[3 * v + 2] = acc2;
            }
        }, threads);
    }
};

std::vector<std::uint8_t> free_mask(const GridSpec& g, const BoundaryCondition& bc) {
    std::vector<std::uint8_t> free(3 * g.num_vertices(), 1);
    const int N = g.N;
    switch (bc.kind) {
        case BoundaryCondition::Kind::TopBottom:
            for (int j = 0; j <= N; ++j)
                for (int k = 0; k <= N; ++k) {
                    for (int comp : {1, 2}) {
                        free[3 * g.vidx(0, j, k) + comp] = 0;
                        free[3 * g.vidx(N, j, k) + comp] = 0;
                    }
                }
            break;
        case BoundaryCondition::Kind::LeftRight:
            for (int i = 0; i <= N; ++i)
                for (int j = 0; j <= N; ++j) {
                    free[3 * g.vidx(i, j, 0) + 2] = 0;
                    free[3 * g.vidx(i, j, N) + 2] = 0;
                }
            break;
        case BoundaryCondition::Kind::Neumann:
            break;
    }
    return free;
}

// Gradient of the u-linear energy terms: the well coupling -4 s e23bar h^3 and
// the Neumann load -gamma M'(u); returned with the sign so that stationarity
// reads L u = b.
std::vector<double> rhs_vector(const GridSpec& g, const SignField& s,
                               const BoundaryCondition& bc) {
    const int N = g.N;
    std::vector<double> b(3 * g.num_vertices(), 0.0);
    const double w = g.h * g.h / 4.0;
    for (int ci = 0; ci < N; ++ci)
        for (int cj = 0; cj < N; ++cj)
            for (int ck = 0; ck < N; ++ck) {
                const double sv = s.at(ci, cj, ck);
                for (int a = 0; a <= 1; ++a)
                    for (int bb = 0; bb <= 1; ++bb)
                        for (int d = 0; d <= 1; ++d) {
                            const std::size_t v = 3 * g.vidx(ci + a, cj + bb, ck + d);
                            b[v + 1] += w * (2 * d - 1) * 2.0 * sv;
                            b[v + 2] += w * (2 * bb - 1) * 2.0 * sv;
                        }
            }
    if (bc.kind == BoundaryCondition::Kind::Neumann && bc.gamma != 0.0) {
        for (int i = 0; i <= N; ++i) {
            const double wi = (i == 0 || i == N) ? 0.5 * g.h : g.h;
            for (int j = 0; j <= N; ++j) {
                const double wj = (j == 0 || j == N) ? 0.5 * g.h : g.h;
                const double load = bc.gamma * wi * wj * g.xv(j);
                b[3 * g.vidx(i, j, N)] += load;
                b[3 * g.vidx(i, j, 0)] -= load;
            }
        }
    }
    return b;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool is_x2_invariant(const SignField& s) {
    const int N = s.grid.N;
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k) {
            const std::int8_t v = s.at(i, 0, k);
            for (int j = 1; j < N; ++j)
                if (s.at(i, j, k) != v) return false;
        }
    return true;
}

SignField project_x2_invariant(const SignField& s) {
    const int N = s.grid.N;
    SignField out(s.grid);
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k) {
            int acc = 0;
            for (int j = 0; j < N; ++j) acc += s.at(i, j, k);
            const std::int8_t v = acc < 0 ? -1 : +1;  // majority, ties to +1
            for (int j = 0; j < N; ++j) out.at(i, j, k) = v;
        }
    return out;
}

}  // namespace

ElasticSolve solve_elastic(const SignField& s, const ProblemSpec& problem,
                           const DisplacementField& u0, const SolverConfig& config) {
    const GridSpec& g = problem.grid;
    if (!(s.grid == g) || !(u0.grid == g))
        throw std::invalid_argument("solve_elastic: grid mismatch");
    ElasticOperator op(g, config.threads);
    const auto free = free_mask(g, problem.bc);
    const auto b = rhs_vector(g, s, problem.bc);

    ElasticSolve out{apply_bc(u0, problem.bc), false, 0};
    std::vector<double>& u = out.u.values;
    const std::size_t n = u.size();

    std::vector<double> r(n), p(n), Ap(n);
    op.apply(u, r);
    double bnorm_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = free[i] ? b[i] - r[i] : 0.0;
        if (free[i]) bnorm_sq += b[i] * b[i];
    }
    const double stop = config.cg_rel_tol * std::sqrt(std::max(bnorm_sq, 1e-300));
    const long max_iters = config.cg_max_iters > 0
                               ? config.cg_max_iters
                               : 10L * g.N * g.N * g.N;
    p = r;
    double rs = dot(r, r);
    long it = 0;
    while (std::sqrt(rs) > stop && it < max_iters) {
        op.apply(p, Ap);
        for (std::size_t i = 0; i < n; ++i)
            if (!free[i]) Ap[i] = 0.0;
        const double pAp = dot(p, Ap);
        if (!(pAp > 0.0)) break;  // hit the consistent nullspace; current iterate is optimal
        const double alpha = rs / pAp;
        for (std::size_t i = 0; i < n; ++i) {
            u[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        const double rs_new = dot(r, r);
        const double beta = rs_new / rs;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rs = rs_new;
        ++it;
    }
    out.iterations = it;
    out.converged = std::sqrt(rs) <= stop;
    return out;
}

SignField update_signs(const DisplacementField& u, const SignField& s, double eps,
                       bool x2_invariant) {
    const GridSpec& g = u.grid;
    if (!(s.grid == g)) throw std::invalid_argument("update_signs: grid mismatch");
    const int N = g.N;
    const double h = g.h;
    const double cell_w = 8.0 * h * h * h;   // d(elastic)/flip = 8 h^3 e23 s
    const double face_w = 2.0 * eps * h * h; // per same-minus-diff neighbor face

    // e23 is frozen during the sweeps
    std::vector<double> e23(g.num_cells());
    parallel_for(g.num_cells(), [&](std::size_t b, std::size_t e) {
        for (std::size_t c = b; c < e; ++c) {
            const int ci = static_cast<int>(c / (static_cast<std::size_t>(N) * N));
            const int cj = static_cast<int>((c / N) % N);
            const int ck = static_cast<int>(c % N);
            e23[c] = strain(u, ci, cj, ck).e23;
        }
    });

    SignField out = x2_invariant && !is_x2_invariant(s) ? project_x2_invariant(s) : s;

    if (!x2_invariant) {
        bool changed = true;
        int sweeps = 0;
        while (changed && sweeps < 100000) {
            changed = false;
            ++sweeps;
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j)
                    for (int k = 0; k < N; ++k) {
                        const std::int8_t sv = out.at(i, j, k);
                        int bal = 0;  // n_same - n_diff over existing neighbors
                        auto nb = [&](int ii, int jj, int kk) {
                            if (ii < 0 || jj < 0 || kk < 0 || ii >= N || jj >= N || kk >= N)
                                return;
                            bal += (out.at(ii, jj, kk) == sv) ? 1 : -1;
                        };
                        nb(i - 1, j, k); nb(i + 1, j, k);
                        nb(i, j - 1, k); nb(i, j + 1, k);
                        nb(i, j, k - 1); nb(i, j, k + 1);
                        const double delta = cell_w * e23[g.cidx(i, j, k)] * sv + face_w * bal;
                        if (delta < 0.0) {
                            out.at(i, j, k) = -sv;
                            changed = true;
                        }
                    }
        }
        return out;
    }

    // column mode: s constant in x2; flip whole (i,k) columns
    bool changed = true;
    int sweeps = 0;
    while (changed && sweeps < 100000) {
        changed = false;
        ++sweeps;
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < N; ++k) {
                const std::int8_t sv = out.at(i, 0, k);
                int bal = 0;
                auto nb = [&](int ii, int kk) {
                    if (ii < 0 || kk < 0 || ii >= N || kk >= N) return;
                    bal += (out.at(ii, 0, kk) == sv) ? 1 : -1;
                };
                nb(i - 1, k); nb(i + 1, k); nb(i, k - 1); nb(i, k + 1);
                double esum = 0.0;
                for (int j = 0; j < N; ++j) esum += e23[g.cidx(i, j, k)];
                const double delta = cell_w * esum * sv + face_w * N * bal;
                if (delta < 0.0) {
                    for (int j = 0; j < N; ++j) out.at(i, j, k) = -sv;
                    changed = true;
                }
            }
    }
    return out;
}

std::vector<SignField> default_seeds(const ProblemSpec& problem) {
    const GridSpec& g = problem.grid;
    double alpha;
    switch (problem.bc.kind) {
        case BoundaryCondition::Kind::TopBottom: alpha = 1.0; break;
        case BoundaryCondition::Kind::LeftRight: alpha = problem.bc.alpha; break;
        default: alpha = problem.bc.gamma >= 0.0 ? -1.0 : 1.0; break;
    }
    std::vector<SignField> seeds;
    seeds.emplace_back(g, +1);
    seeds.emplace_back(g, -1);
    const int n_opt = laminate_optimal_n(alpha == 0.0 ? 1.0 : alpha, problem.eps);
    std::vector<int> ns = {1, 2, n_opt};
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    for (int n : ns) {
        if (2 * n > g.N) continue;  // finer than the grid resolves
        LaminateParams lp{alpha, n, true};
        seeds.push_back(sample_laminate_sign(g, lp));
    }
    return seeds;
}

SolveResult minimize(const ProblemSpec& problem, const SolverConfig& config) {
    const std::vector<SignField> seeds =
        config.seeds.empty() ? default_seeds(problem) : config.seeds;
    const bool x2inv = problem.bc.ansatz_constrained;

    SolveResult best{DisplacementField(problem.grid), SignField(problem.grid), {}, {}, false};
    bool have_best = false;

    for (const SignField& seed : seeds) {
        SignField s = x2inv && !is_x2_invariant(seed) ? project_x2_invariant(seed) : seed;
        DisplacementField u = apply_bc(DisplacementField(problem.grid), problem.bc);
        SolveResult run{u, s, {}, {}, false};
        EnergyBreakdown cur = total_energy(u, s, problem.eps, problem.bc);
        run.trace.push_back(cur.total);
        bool converged = false;
        for (int outer = 0; outer < config.outer_max; ++outer) {
            ElasticSolve es = solve_elastic(s, problem, u, config);
            SignField s_new = update_signs(es.u, s, problem.eps, x2inv);
            EnergyBreakdown next = total_energy(es.u, s_new, problem.eps, problem.bc);
            if (next.total > cur.total) {
                // CG tolerance noise; keep the previous iterate
                converged = true;
                break;
            }
            u = std::move(es.u);
            s = std::move(s_new);
            run.trace.push_back(next.total);
            const double drop = cur.total - next.total;
            cur = next;
            if (drop < 1e-10 * std::max(1.0, std::abs(cur.total))) {
                converged = es.converged;
                break;
            }
        }
        run.u = std::move(u);
        run.s = std::move(s);
        run.energy = cur;
        run.converged = converged;
        if (!have_best || run.energy.total < best.energy.total) {
            best = std::move(run);
            have_best = true;
        }
    }
    return best;
}

FamilyResult family_search(const ProblemSpec& problem) {
    const BoundaryCondition& bc = problem.bc;
    const double eps = problem.eps;

    struct Candidate {
        double total;
        bool is_laminate;
        LaminateParams lp;
        double t;
        EnergyBreakdown energy;
    };
    std::vector<Candidate> cands;

    auto push_laminates = [&](double alpha, double load_gamma) {
        const int n_opt = laminate_optimal_n(alpha == 0.0 ? 1.0 : alpha, eps);
        for (bool sym : {true, false})
            for (int n = 1; n <= 4 * n_opt; ++n) {
                LaminateParams lp{alpha, n, sym};
                EnergyBreakdown e = analytic_energy_laminate(lp, eps);
                if (load_gamma != 0.0) {
                    const double load = -load_gamma * laminate_m_prime(lp);
                    e = EnergyBreakdown::make(e.elastic, e.surface, eps, load);
                }
                cands.push_back({e.total, true, lp, 0.0, e});
            }
    };

    switch (bc.kind) {
        case BoundaryCondition::Kind::TopBottom:
            // w is not admissible here (its u2 trace misses -x3 at x1 = -1)
            push_laminates(1.0, 0.0);
            break;
        case BoundaryCondition::Kind::LeftRight: {
            push_laminates(bc.alpha, 0.0);
            EnergyBreakdown e = affine_w_energy(bc.alpha, eps);
            cands.push_back({e.total, false, {}, bc.alpha, e});
            break;
        }
        case BoundaryCondition::Kind::Neumann: {
            const double alpha_lam = bc.gamma >= 0.0 ? -1.0 : 1.0;
            push_laminates(alpha_lam, bc.gamma);
            const double t = neumann_affine_best_t(bc.gamma);
            const double load = -bc.gamma * neumann_affine_m_prime(t);
            EnergyBreakdown e =
                EnergyBreakdown::make(neumann_affine_elastic(t), 0.0, eps, load);
            cands.push_back({e.total, false, {}, t, e});
            break;
        }
    }

    const Candidate* win = &cands.front();
    for (const Candidate& c : cands)
        if (c.total < win->total) win = &c;

    FamilyResult out{
        win->is_laminate ? "laminate" : "affine",
        win->lp,
        win->t,
        win->energy,
        DisplacementField(problem.grid),
        SignField(problem.grid, +1),
    };
    if (win->is_laminate) {
        auto [u, s] = sample_laminate(problem.grid, win->lp);
        out.u = std::move(u);
        out.s = std::move(s);
    } else if (bc.kind == BoundaryCondition::Kind::Neumann) {
        out.u = sample_displacement(problem.grid,
                                    [t = win->t](const Point& x) { return neumann_affine_u(t, x); });
    } else {
        out.u = sample_displacement(problem.grid, [a = bc.alpha](const Point& x) {
            return affine_w(a, x);
        });
    }
    return out;
}

}  // namespace twinlab
