#include "twinlab/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "twinlab/parallel.hpp"

namespace twinlab {

double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

namespace {

// d(u_comp)/dx_axis at the center of cell (ci,cj,ck): average of the four edge
// differences along `axis`, divided by h.
inline double cell_derivative(const DisplacementField& u, int ci, int cj, int ck,
                              int comp, int axis) {
    const GridSpec& g = u.grid;
    double acc = 0.0;
    for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b) {
            int i0 = ci, j0 = cj, k0 = ck;
            int i1, j1, k1;
            switch (axis) {
                case 0:
                    j0 += a; k0 += b;
                    i1 = i0 + 1; j1 = j0; k1 = k0;
                    break;
                case 1:
                    i0 += a; k0 += b;
                    i1 = i0; j1 = j0 + 1; k1 = k0;
                    break;
                default:
                    i0 += a; j0 += b;
                    i1 = i0; j1 = j0; k1 = k0 + 1;
                    break;
            }
            acc += u.at(i1, j1, k1, comp) - u.at(i0, j0, k0, comp);
        }
    return acc / (4.0 * g.h);
}

}  // namespace

SymTensor3 strain(const DisplacementField& u, int ci, int cj, int ck) {
    const int N = u.grid.N;
    if (ci < 0 || cj < 0 || ck < 0 || ci >= N || cj >= N || ck >= N)
        throw std::out_of_range("strain: cell index out of range");
    const double d1u1 = cell_derivative(u, ci, cj, ck, 0, 0);
    const double d2u1 = cell_derivative(u, ci, cj, ck, 0, 1);
    const double d3u1 = cell_derivative(u, ci, cj, ck, 0, 2);
    const double d1u2 = cell_derivative(u, ci, cj, ck, 1, 0);
    const double d2u2 = cell_derivative(u, ci, cj, ck, 1, 1);
    const double d3u2 = cell_derivative(u, ci, cj, ck, 1, 2);
    const double d1u3 = cell_derivative(u, ci, cj, ck, 2, 0);
    const double d2u3 = cell_derivative(u, ci, cj, ck, 2, 1);
    const double d3u3 = cell_derivative(u, ci, cj, ck, 2, 2);
    return SymTensor3(d1u1, d2u2, d3u3,
                      0.5 * (d2u1 + d1u2),
                      0.5 * (d3u1 + d1u3),
                      0.5 * (d3u2 + d2u3));
}

double elastic_energy(const DisplacementField& u, const SignField* s, EnergyModel model) {
    const GridSpec& g = u.grid;
    const int N = g.N;
    if (s && !(s->grid == g))
        throw std::invalid_argument("elastic_energy: sign field grid mismatch");
    std::vector<double> dens(g.num_cells());
    parallel_for(g.num_cells(), [&](std::size_t b, std::size_t e) {
        for (std::size_t c = b; c < e; ++c) {
            const int ci = static_cast<int>(c / (static_cast<std::size_t>(N) * N));
            const int cj = static_cast<int>((c / N) % N);
            const int ck = static_cast<int>(c % N);
            const SymTensor3 xi = strain(u, ci, cj, ck);
            switch (model) {
                case EnergyModel::HardConstraint: dens[c] = eval_W(xi); break;
                case EnergyModel::QuasiconvexEnvelope: dens[c] = eval_W_qc(xi); break;
                default:
                    dens[c] = s ? eval_W_twowell_signed(xi, s->values[c])
                                : eval_W_twowell(xi).value;
                    break;
            }
        }
    });
    // a single violating cell poisons the sum with +inf
    return pairwise_sum(dens) * g.h * g.h * g.h;
}

double constraint_violation(const DisplacementField& u, const SignField& s) {
    const GridSpec& g = u.grid;
    const int N = g.N;
    std::vector<double> dens(g.num_cells());
    parallel_for(g.num_cells(), [&](std::size_t b, std::size_t e) {
        for (std::size_t c = b; c < e; ++c) {
            const int ci = static_cast<int>(c / (static_cast<std::size_t>(N) * N));
            const int cj = static_cast<int>((c / N) % N);
            const int ck = static_cast<int>(c % N);
            const double d = strain(u, ci, cj, ck).e23 - s.values[c];
            dens[c] = d * d;
        }
    });
    return pairwise_sum(dens) * g.h * g.h * g.h;
}

double surface_energy(const SignField& s) {
    const GridSpec& g = s.grid;
    const int N = g.N;
    std::vector<double> jumps;
    jumps.reserve(3 * g.num_cells());
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                const std::int8_t v = s.at(i, j, k);
                if (i + 1 < N) jumps.push_back(std::abs(static_cast<int>(v) - s.at(i + 1, j, k)));
                if (j + 1 < N) jumps.push_back(std::abs(static_cast<int>(v) - s.at(i, j + 1, k)));
                if (k + 1 < N) jumps.push_back(std::abs(static_cast<int>(v) - s.at(i, j, k + 1)));
            }
    return pairwise_sum(jumps) * g.h * g.h;
}

SignField sign_of_e23(const DisplacementField& u) {
    const GridSpec& g = u.grid;
    const int N = g.N;
    SignField s(g);
    parallel_for(g.num_cells(), [&](std::size_t b, std::size_t e) {
        for (std::size_t c = b; c < e; ++c) {
            const int ci = static_cast<int>(c / (static_cast<std::size_t>(N) * N));
            const int cj = static_cast<int>((c / N) % N);
            const int ck = static_cast<int>(c % N);
            s.values[c] = strain(u, ci, cj, ck).e23 < 0.0 ? -1 : +1;
        }
    });
    return s;
}

namespace {
inline double trap_weight(int i, int N, double h) {
    return (i == 0 || i == N) ? 0.5 * h : h;
}
}  // namespace

double m_prime(const DisplacementField& u) {
    const GridSpec& g = u.grid;
    const int N = g.N;
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(N + 1) * (N + 1));
    for (int i = 0; i <= N; ++i) {
        const double wi = trap_weight(i, N, g.h);
        for (int j = 0; j <= N; ++j) {
            const double wj = trap_weight(j, N, g.h);
            terms.push_back(wi * wj * g.xv(j) * (u.at(i, j, N, 0) - u.at(i, j, 0, 0)));
        }
    }
    return pairwise_sum(terms);
}

double m_prime_exact(const std::function<Vec3(const Point&)>& u, int cells_per_axis) {
    const int M = cells_per_axis;
    const double hq = 2.0 / M;
    const double off = 0.5 / std::sqrt(3.0);  // Gauss-Legendre 2-point offsets
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(M) * M * 4);
    for (int i = 0; i < M; ++i) {
        const double c1 = -1.0 + hq * (i + 0.5);
        for (int j = 0; j < M; ++j) {
            const double c2 = -1.0 + hq * (j + 0.5);
            for (int a = -1; a <= 1; a += 2)
                for (int b = -1; b <= 1; b += 2) {
                    const double x1 = c1 + a * off * hq;
                    const double x2 = c2 + b * off * hq;
                    const double top = u({x1, x2, 1.0})[0];
                    const double bot = u({x1, x2, -1.0})[0];
                    terms.push_back(0.25 * hq * hq * x2 * (top - bot));
                }
        }
    }
    return pairwise_sum(terms);
}

DisplacementField apply_bc(const DisplacementField& u, const BoundaryCondition& bc) {
    DisplacementField out = u;
    const GridSpec& g = u.grid;
    const int N = g.N;
    switch (bc.kind) {
        case BoundaryCondition::Kind::TopBottom:
            for (int j = 0; j <= N; ++j)
                for (int k = 0; k <= N; ++k) {
                    out.at(0, j, k, 1) = -g.xv(k);
                    out.at(0, j, k, 2) = -g.xv(j);
                    out.at(N, j, k, 1) = g.xv(k);
                    out.at(N, j, k, 2) = g.xv(j);
                }
            break;
        case BoundaryCondition::Kind::LeftRight:
            for (int i = 0; i <= N; ++i)
                for (int j = 0; j <= N; ++j) {
                    const double v = bc.alpha * g.xv(i) * g.xv(j);
                    out.at(i, j, 0, 2) = v;
                    out.at(i, j, N, 2) = v;
                }
            break;
        case BoundaryCondition::Kind::Neumann:
            break;
    }
    return out;
}

bool satisfies_bc(const DisplacementField& u, const BoundaryCondition& bc, double tol) {
    const GridSpec& g = u.grid;
    const int N = g.N;
    switch (bc.kind) {
        case BoundaryCondition::Kind::TopBottom:
            for (int j = 0; j <= N; ++j)
                for (int k = 0; k <= N; ++k) {
                    if (std::abs(u.at(0, j, k, 1) + g.xv(k)) > tol) return false;
                    if (std::abs(u.at(0, j, k, 2) + g.xv(j)) > tol) return false;
                    if (std::abs(u.at(N, j, k, 1) - g.xv(k)) > tol) return false;
                    if (std::abs(u.at(N, j, k, 2) - g.xv(j)) > tol) return false;
                }
            return true;
        case BoundaryCondition::Kind::LeftRight:
            for (int i = 0; i <= N; ++i)
                for (int j = 0; j <= N; ++j) {
                    const double v = bc.alpha * g.xv(i) * g.xv(j);
                    if (std::abs(u.at(i, j, 0, 2) - v) > tol) return false;
                    if (std::abs(u.at(i, j, N, 2) - v) > tol) return false;
                }
            return true;
        case BoundaryCondition::Kind::Neumann:
            return true;
    }
    return true;
}

EnergyBreakdown total_energy(const DisplacementField& u, const SignField& s, double eps,
                             const BoundaryCondition& bc, EnergyModel model) {
    if (!(eps > 0.0)) throw std::invalid_argument("total_energy: eps must be > 0");
    const double elastic = elastic_energy(u, &s, model);
    const double surface = surface_energy(s);
    const double load =
        bc.kind == BoundaryCondition::Kind::Neumann ? -bc.gamma * m_prime(u) : 0.0;
    const double violation =
        std::isfinite(elastic) ? constraint_violation(u, s) : kInfiniteEnergy;
    return EnergyBreakdown::make(elastic, surface, eps, load, violation);
}

DisplacementField sample_displacement(GridSpec grid,
                                      const std::function<Vec3(const Point&)>& u) {
    DisplacementField f(grid);
    const int N = grid.N;
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j)
            for (int k = 0; k <= N; ++k) {
                const Vec3 v = u({grid.xv(i), grid.xv(j), grid.xv(k)});
                f.at(i, j, k, 0) = v[0];
                f.at(i, j, k, 1) = v[1];
                f.at(i, j, k, 2) = v[2];
            }
    return f;
}

}  // namespace twinlab
