#include "twinlab/dual.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twinlab {

namespace {
constexpr double kCtol = 0.1;  // frozen against manufactured smooth fields (see tests)

// cell-centered difference of a 2D vertex array (same averaged-edge stencil as
// the 3D strain, restricted to a slice)
inline double d2_cell(const std::vector<double>& v, int N, int j, int k) {
    const double h = 2.0 / N;
    return 0.5 * ((v[(j + 1) * (N + 1) + k] - v[j * (N + 1) + k]) +
                  (v[(j + 1) * (N + 1) + k + 1] - v[j * (N + 1) + k + 1])) / h;
}
inline double d3_cell(const std::vector<double>& v, int N, int j, int k) {
    const double h = 2.0 / N;
    return 0.5 * ((v[j * (N + 1) + k + 1] - v[j * (N + 1) + k]) +
                  (v[(j + 1) * (N + 1) + k + 1] - v[(j + 1) * (N + 1) + k])) / h;
}
inline double mixed_cell(const std::vector<double>& v, int N, int j, int k) {
    const double h = 2.0 / N;
    return (v[(j + 1) * (N + 1) + k + 1] - v[(j + 1) * (N + 1) + k] -
            v[j * (N + 1) + k + 1] + v[j * (N + 1) + k]) / (h * h);
}

int snap_layer(const GridSpec& g, double x1_star) {
    const int i = static_cast<int>(std::lround((x1_star + 1.0) / g.h - 0.5));
    return std::clamp(i, 0, g.N - 1);
}

void require_top_bottom(const DisplacementField& u) {
    if (!satisfies_bc(u, BoundaryCondition::top_bottom(), 1e-12))
        throw std::invalid_argument(
            "dual_bound: field violates the top/bottom Dirichlet rows");
}

// x1-pair-averaged slice trace of component comp, as a 2D vertex array
std::vector<double> slice_average(const DisplacementField& u, int layer, int comp) {
    const int N = u.grid.N;
    std::vector<double> v(static_cast<std::size_t>(N + 1) * (N + 1));
    for (int j = 0; j <= N; ++j)
        for (int k = 0; k <= N; ++k)
            v[j * (N + 1) + k] =
                0.5 * (u.at(layer, j, k, comp) + u.at(layer + 1, j, k, comp));
    return v;
}

}  // namespace

TestFunction2D::TestFunction2D(int n, std::vector<double> vertex_values)
    : N(n), h(2.0 / n), eta(std::move(vertex_values)) {
    if (eta.size() != static_cast<std::size_t>(N + 1) * (N + 1))
        throw std::invalid_argument("TestFunction2D: wrong vertex count");
    for (int j = 0; j <= N; ++j)
        if (eta[j * (N + 1)] != 0.0 || eta[j * (N + 1) + N] != 0.0 ||
            eta[0 * (N + 1) + j] != 0.0 || eta[static_cast<std::size_t>(N) * (N + 1) + j] != 0.0)
            throw std::invalid_argument("TestFunction2D: must vanish on the slice boundary");
    d2.resize(static_cast<std::size_t>(N) * N);
    d3.resize(static_cast<std::size_t>(N) * N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
            d2[j * N + k] = d2_cell(eta, N, j, k);
            d3[j * N + k] = d3_cell(eta, N, j, k);
        }
}

TestFunction2D TestFunction2D::zero(int n) {
    return TestFunction2D(n, std::vector<double>(static_cast<std::size_t>(n + 1) * (n + 1), 0.0));
}

TestFunction2D TestFunction2D::scaled(double lambda) const {
    std::vector<double> v = eta;
    for (double& x : v) x *= lambda;
    return TestFunction2D(N, std::move(v));
}

PiecewiseLinear default_theta() {
    // triangle on (-1/2, 1/2), peak 2 so the L1 norm is exactly 1
    return PiecewiseLinear({-1.0, -0.5, 0.0, 0.5, 1.0}, {0.0, 0.0, 2.0, 0.0, 0.0});
}

DualReport dual_bound_report(const DisplacementField& u, const TestFunction2D& eta,
                             double x1_star) {
    require_top_bottom(u);
    const GridSpec& g = u.grid;
    const int N = g.N;
    if (eta.N != N) throw std::invalid_argument("dual_bound: eta grid mismatch");
    const int layer = snap_layer(g, x1_star);
    const double x1s = g.xc(layer);
    const double h = g.h;

    const std::vector<double> v2 = slice_average(u, layer, 1);
    const std::vector<double> v3 = slice_average(u, layer, 2);

    double A = 0.0, grad_sq = 0.0, R = 0.0;
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
            const double rot = d2_cell(v3, N, j, k) - d3_cell(v2, N, j, k);
            const double ebar = 0.25 * (eta.at(j, k) + eta.at(j + 1, k) +
                                        eta.at(j, k + 1) + eta.at(j + 1, k + 1));
            A += rot * ebar * h * h;
            const double e2 = eta.d2[j * N + k];
            const double e3 = eta.d3[j * N + k];
            grad_sq += (e2 * e2 + e3 * e3) * h * h;
            // summation-by-parts remainder of the slice rewrite (exact)
            const double em = mixed_cell(eta.eta, N, j, k);
            R += (h * h * h * h / 12.0) *
                 (mixed_cell(v3, N, j, k) * e3 + d3_cell(v3, N, j, k) * em -
                  mixed_cell(v2, N, j, k) * e2 - d2_cell(v2, N, j, k) * em);
        }
    const double B = 0.5 * (x1s + 1.0) * grad_sq;

    DualReport rep;
    rep.A = A;
    rep.B = B;
    rep.value = A - B;
    rep.remainder = R;
    rep.tol = kCtol * h * (1.0 + grad_sq) + std::abs(R);
    rep.x1_star = x1s;
    rep.slice_layer = layer;
    return rep;
}

double dual_bound(const DisplacementField& u, const TestFunction2D& eta, double x1_star) {
    return dual_bound_report(u, eta, x1_star).value;
}

EtaBuild build_eta(const DisplacementField& u, double x1_star, const PiecewiseLinear& theta) {
    require_top_bottom(u);
    if (std::abs(theta.l1_norm() - 1.0) > 1e-12)
        throw std::invalid_argument("build_eta: theta must have unit L1 norm");
    if (theta(-1.0) != 0.0 || theta(1.0) != 0.0)
        throw std::invalid_argument("build_eta: theta must be compactly supported in (-1,1)");
    for (double yv : theta.y)
        if (yv < 0.0) throw std::invalid_argument("build_eta: theta must be nonnegative");

    const GridSpec& g = u.grid;
    const int N = g.N;
    const double h = g.h;
    const int layer = snap_layer(g, x1_star);

    const std::vector<double> v2 = slice_average(u, layer, 1);
    const std::vector<double> v3 = slice_average(u, layer, 2);

    SliceData slice;
    slice.x1_star = g.xc(layer);
    slice.phi.resize(N);
    for (int k = 0; k < N; ++k) {
        double acc = 0.0;
        for (int j = 0; j < N; ++j) acc += d2_cell(v3, N, j, k) - d3_cell(v2, N, j, k);
        slice.phi[k] = acc / N;
    }
    // piecewise-linear antiderivative on the x3 vertices, then zero mean
    slice.beta.assign(N + 1, 0.0);
    for (int k = 0; k < N; ++k) slice.beta[k + 1] = slice.beta[k] + h * slice.phi[k];
    double mean = 0.0;
    for (int k = 0; k < N; ++k) mean += 0.5 * (slice.beta[k] + slice.beta[k + 1]) * h;
    mean /= 2.0;
    slice.c_star = mean;
    for (double& b : slice.beta) b -= mean;
    slice.eta0.assign(N + 1, 0.0);
    for (int k = 0; k < N; ++k)
        slice.eta0[k + 1] = slice.eta0[k] + 0.5 * h * (slice.beta[k] + slice.beta[k + 1]);
    slice.eta0[N] = 0.0;  // exact by the zero-mean choice; drop rounding residue

    const double C_theta = theta.l2_norm_sq() + 4.0 * theta.slope_l2_norm_sq();
    const double gamma = 1.0 / (2.0 * C_theta);

    std::vector<double> vals(static_cast<std::size_t>(N + 1) * (N + 1));
    for (int j = 0; j <= N; ++j) {
        const double th = theta(g.xv(j));
        for (int k = 0; k <= N; ++k) vals[j * (N + 1) + k] = gamma * th * slice.eta0[k];
    }
    return EtaBuild{TestFunction2D(N, std::move(vals)), std::move(slice), C_theta, gamma};
}

BestSliceResult best_slice_bound(const DisplacementField& u, const PiecewiseLinear& theta) {
    require_top_bottom(u);
    const GridSpec& g = u.grid;
    BestSliceResult best;
    bool have = false;
    for (int layer = 0; layer < g.N; ++layer) {
        const double x1s = g.xc(layer);
        if (!(x1s > -0.25 && x1s < 0.25)) continue;
        EtaBuild eb = build_eta(u, x1s, theta);
        DualReport rep = dual_bound_report(u, eb.eta, x1s);
        double lambda = 0.0, bound = 0.0, tol = rep.tol;
        if (rep.B > 0.0) {
            lambda = rep.A / (2.0 * rep.B);
            bound = rep.A * rep.A / (4.0 * rep.B);
            // tolerance of the rescaled test function lambda * eta
            const double grad_sq = 2.0 * rep.B / (x1s + 1.0);
            tol = kCtol * g.h * (1.0 + lambda * lambda * grad_sq) +
                  std::abs(lambda) * std::abs(rep.remainder);
        }
        if (!have || bound > best.bound) {
            best.x1_star = x1s;
            best.bound = bound;
            best.lambda = lambda;
            best.tol = tol;
            best.report = rep;
            have = true;
        }
    }
    if (!have) throw std::invalid_argument("best_slice_bound: grid too coarse for the scan");
    return best;
}

}  // namespace twinlab
