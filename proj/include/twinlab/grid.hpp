#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace twinlab {

/// Uniform grid on the cube (-1,1)^3: N cells per axis, N+1 vertices, h = 2/N.
struct GridSpec {
    int N;
    double h;

    explicit GridSpec(int n) : N(n), h(2.0 / n) {
        if (n < 2) throw std::invalid_argument("GridSpec: N must be >= 2");
    }

    int vertices_per_axis() const { return N + 1; }
    std::size_t num_vertices() const {
        const std::size_t m = static_cast<std::size_t>(N) + 1;
        return m * m * m;
    }
    std::size_t num_cells() const {
        const std::size_t m = static_cast<std::size_t>(N);
        return m * m * m;
    }

    double xv(int i) const { return -1.0 + h * i; }            // vertex coordinate
    double xc(int i) const { return -1.0 + h * (i + 0.5); }    // cell-center coordinate

    std::size_t vidx(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * (N + 1) + j) * (N + 1) + k;
    }
    std::size_t cidx(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * N + j) * N + k;
    }

    bool operator==(const GridSpec& o) const { return N == o.N; }
};

/// Nodal 3-vector field; components interleaved per vertex, lexicographic (i,j,k).
struct DisplacementField {
    GridSpec grid;
    std::vector<double> values;  // size 3 * (N+1)^3

    explicit DisplacementField(GridSpec g) : grid(g), values(3 * g.num_vertices(), 0.0) {}

    double& at(int i, int j, int k, int comp) { return values[3 * grid.vidx(i, j, k) + comp]; }
    double at(int i, int j, int k, int comp) const { return values[3 * grid.vidx(i, j, k) + comp]; }
};

/// Cell-centered variant indicator, +-1 per cell.
struct SignField {
    GridSpec grid;
    std::vector<std::int8_t> values;  // size N^3, entries exactly +-1

    explicit SignField(GridSpec g, std::int8_t fill = +1) : grid(g), values(g.num_cells(), fill) {}

    std::int8_t& at(int i, int j, int k) { return values[grid.cidx(i, j, k)]; }
    std::int8_t at(int i, int j, int k) const { return values[grid.cidx(i, j, k)]; }
};

struct BoundaryCondition {
    enum class Kind { TopBottom, LeftRight, Neumann };

    Kind kind = Kind::Neumann;
    double alpha = 0.0;              // LeftRight bending amplitude, in [-1,1]
    double gamma = 0.0;              // Neumann load strength
    bool ansatz_constrained = false; // restrict sign fields to x2-invariant ones

    static BoundaryCondition top_bottom() {
        BoundaryCondition bc;
        bc.kind = Kind::TopBottom;
        return bc;
    }
    static BoundaryCondition left_right(double alpha) {
        if (!(alpha >= -1.0 && alpha <= 1.0))
            throw std::invalid_argument("BoundaryCondition: alpha must lie in [-1,1]");
        BoundaryCondition bc;
        bc.kind = Kind::LeftRight;
        bc.alpha = alpha;
        return bc;
    }
    static BoundaryCondition neumann(double gamma) {
        BoundaryCondition bc;
        bc.kind = Kind::Neumann;
        bc.gamma = gamma;
        return bc;
    }
};

struct EnergyBreakdown {
    double elastic = 0.0;
    double surface = 0.0;
    double load = 0.0;   // -gamma * M'(u) for Neumann runs, 0 for Dirichlet
    double total = 0.0;  // elastic + eps * surface + load, added in this order
    double constraint_violation = 0.0;  // integral of (e23 - s)^2, diagnostic

    static EnergyBreakdown make(double elastic, double surface, double eps, double load,
                                double violation = 0.0) {
        EnergyBreakdown b;
        b.elastic = elastic;
        b.surface = surface;
        b.load = load;
        b.total = elastic + eps * surface + load;
        b.constraint_violation = violation;
        return b;
    }
};

}  // namespace twinlab
