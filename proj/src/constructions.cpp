#include "twinlab/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twinlab {

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs, std::vector<double> ys)
    : x(std::move(xs)), y(std::move(ys)) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("PiecewiseLinear: need matching arrays, >= 2 points");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            throw std::invalid_argument("PiecewiseLinear: breakpoints must increase");
}

double PiecewiseLinear::operator()(double t) const {
    if (t <= x.front()) return y.front();
    if (t >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), t);
    const std::size_t s = static_cast<std::size_t>(it - x.begin()) - 1;
    const double w = (t - x[s]) / (x[s + 1] - x[s]);
    return y[s] + w * (y[s + 1] - y[s]);
}

double PiecewiseLinear::slope(std::size_t seg) const {
    return (y[seg + 1] - y[seg]) / (x[seg + 1] - x[seg]);
}

double PiecewiseLinear::lipschitz() const {
    double m = 0.0;
    for (std::size_t s = 0; s < segments(); ++s) m = std::max(m, std::abs(slope(s)));
    return m;
}

double PiecewiseLinear::l1_norm() const {
    // exact integral of |f| per segment, splitting at interior zeros
    double acc = 0.0;
    for (std::size_t s = 0; s < segments(); ++s) {
        const double a = y[s], b = y[s + 1], w = x[s + 1] - x[s];
        if (a * b >= 0.0) {
            acc += 0.5 * (std::abs(a) + std::abs(b)) * w;
        } else {
            const double t = a / (a - b);  // zero crossing fraction
            acc += 0.5 * std::abs(a) * t * w + 0.5 * std::abs(b) * (1.0 - t) * w;
        }
    }
    return acc;
}

double PiecewiseLinear::l2_norm_sq() const {
    double acc = 0.0;
    for (std::size_t s = 0; s < segments(); ++s) {
        const double a = y[s], b = y[s + 1], w = x[s + 1] - x[s];
        acc += w * (a * a + a * b + b * b) / 3.0;
    }
    return acc;
}

double PiecewiseLinear::slope_l2_norm_sq() const {
    double acc = 0.0;
    for (std::size_t s = 0; s < segments(); ++s) {
        const double m = slope(s);
        acc += m * m * (x[s + 1] - x[s]);
    }
    return acc;
}

// ---------------------------------------------------------------------------

Vec3 u_star(double alpha, const Point& p) {
    return {-alpha * p[1] * p[2], alpha * p[0] * p[2], alpha * p[0] * p[1]};
}

SymTensor3 u_star_strain(double alpha, const Point& p) {
    return SymTensor3(0, 0, 0, 0, 0, alpha * p[0]);
}

void RelaxedFamilyParams::validate() const {
    if (!(alpha >= -1.0 && alpha <= 1.0))
        throw std::invalid_argument("RelaxedFamilyParams: alpha outside [-1,1]");
    const double lip_cap = 2.0 * (1.0 - std::abs(alpha));
    if (psi.segments() > 0 && psi.lipschitz() > lip_cap + 1e-15)
        throw std::invalid_argument("RelaxedFamilyParams: Lip(psi) exceeds 2(1-|alpha|)");
}

Vec3 relaxed_family(const RelaxedFamilyParams& p, const Point& x) {
    p.validate();
    const Vec3 base = u_star(p.alpha, x);
    const double psix3 = p.psi.segments() > 0 ? p.psi(x[2]) : 0.0;
    return {base[0] + p.d * x[1] + p.c, base[1] - p.d * x[0] + psix3, base[2]};
}

SymTensor3 relaxed_family_strain(const RelaxedFamilyParams& p, const Point& x) {
    p.validate();
    double dpsi = 0.0;
    if (p.psi.segments() > 0) {
        // derivative of the segment containing x3 (upper segment on breakpoints)
        const auto& xs = p.psi.x;
        if (x[2] > xs.front() && x[2] < xs.back()) {
            auto it = std::upper_bound(xs.begin(), xs.end(), x[2]);
            std::size_t s = static_cast<std::size_t>(it - xs.begin());
            s = s == 0 ? 0 : s - 1;
            s = std::min(s, p.psi.segments() - 1);
            dpsi = p.psi.slope(s);
        }
    }
    return SymTensor3(0, 0, 0, 0, 0, p.alpha * x[0] + 0.5 * dpsi);
}

double relaxed_family_energy_qc(double alpha, const PiecewiseLinear& psi) {
    // e23(x1,x3) = alpha x1 + psi'(x3)/2; sup over x1 in (-1,1) is
    // |alpha| + |slope|/2 on each x3-segment. W^qc vanishes wherever the
    // constraint holds and the remaining strain components are identically 0.
    const double a = std::abs(alpha);
    for (std::size_t s = 0; s < psi.segments(); ++s)
        if (a + 0.5 * std::abs(psi.slope(s)) > 1.0 + 1e-15) return kInfiniteEnergy;
    return 0.0;
}

// ---------------------------------------------------------------------------

void LaminateParams::validate() const {
    if (!(alpha >= -1.0 && alpha <= 1.0))
        throw std::invalid_argument("LaminateParams: alpha outside [-1,1]");
    if (n < 1) throw std::invalid_argument("LaminateParams: n must be >= 1");
}

namespace {
inline int slice_of(double x3, int n) {
    const int k = static_cast<int>(std::floor(x3 * n));  // x3 on a boundary -> upper slice
    return std::clamp(k, -n, n - 1);
}
inline double sigma_of(const LaminateParams& p, int k) {
    if (!p.symmetric) return 1.0;
    return (k % 2 == 0) ? 1.0 : -1.0;
}
}  // namespace

double laminate_interface(const LaminateParams& p, int k, double x1) {
    p.validate();
    if (k < -p.n || k >= p.n) throw std::out_of_range("laminate_interface: k outside [-n, n-1]");
    const double d = p.delta();
    return 0.5 * (sigma_of(p, k) * p.alpha * x1 + 1.0) * d + k * d;
}

Vec3 laminate_u(const LaminateParams& p, const Point& x) {
    p.validate();
    const double a = p.alpha, d = p.delta();
    const int k = slice_of(x[2], p.n);
    const double sg = sigma_of(p, k);
    const double f = 0.5 * (sg * a * x[0] + 1.0) * d + k * d;
    double u2;
    if (x[2] <= f) {
        u2 = (2.0 * sg - a * x[0]) * x[2] + 2.0 * a * x[0] * k * d - 2.0 * sg * k * d;
    } else {
        u2 = (-2.0 * sg - a * x[0]) * x[2] + 2.0 * a * x[0] * (k + 1) * d +
             2.0 * sg * (k + 1) * d;
    }
    return {-a * x[1] * x[2], u2, a * x[0] * x[1]};
}

int laminate_sign(const LaminateParams& p, const Point& x) {
    p.validate();
    const int k = slice_of(x[2], p.n);
    const double sg = sigma_of(p, k);
    const double f = 0.5 * (sg * p.alpha * x[0] + 1.0) * p.delta() + k * p.delta();
    return x[2] <= f ? static_cast<int>(sg) : -static_cast<int>(sg);
}

SymTensor3 laminate_strain(const LaminateParams& p, const Point& x) {
    p.validate();
    const double a = p.alpha, d = p.delta();
    const int k = slice_of(x[2], p.n);
    const double sg = sigma_of(p, k);
    const double f = 0.5 * (sg * a * x[0] + 1.0) * d + k * d;
    const bool below = x[2] <= f;
    const double e12 = below ? a * (k * d - x[2]) : a * ((k + 1) * d - x[2]);
    const double e23 = below ? sg : -sg;
    return SymTensor3(0, 0, 0, e12, 0, e23);
}

int laminate_optimal_n(double alpha, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("laminate_optimal_n: eps must be > 0");
    const double c = std::cbrt(alpha * alpha / eps);
    // shave FP noise so exact integers are not pushed to the next ceil
    const int n = static_cast<int>(std::ceil(c * (1.0 - 1e-12)));
    return std::max(1, n);
}

EnergyBreakdown analytic_energy_laminate(const LaminateParams& p, double eps) {
    p.validate();
    if (!(eps > 0.0)) throw std::invalid_argument("analytic_energy_laminate: eps must be > 0");
    const double a = p.alpha, d = p.delta();
    // Per slice, with g(x1) = interface offset in [0, delta]:
    //   int_0^g 2 a^2 y^2 dy + int_g^delta 2 a^2 (delta-y)^2 dy
    //   = (2/3) a^2 [g^3 + (delta-g)^3],
    // then integrating over x1 with g = delta (s a x1 + 1)/2 and the x2 extent 2:
    //   E_k = (2/3) a^2 delta^3 (1 + a^2).
    double elastic = 0.0;
    for (int k = -p.n; k < p.n; ++k)
        elastic += (2.0 / 3.0) * a * a * d * d * d * (1.0 + a * a);
    // Oblique interface per slice: graph of slope s a delta / 2 over
    // x1 in (-1,1) extruded in x2 -> area 2 * 2 sqrt(1 + (a delta/2)^2).
    double area = 2.0 * p.n * 4.0 * std::sqrt(1.0 + 0.25 * a * a * d * d);
    if (!p.symmetric) area += 4.0 * (2 * p.n - 1);  // vertical joins at interior slab planes
    const double surface = 2.0 * area;
    return EnergyBreakdown::make(elastic, surface, eps, 0.0);
}

double laminate_m_prime(const LaminateParams& p) { return -(8.0 / 3.0) * p.alpha; }

// ---------------------------------------------------------------------------

Vec3 affine_w(double alpha, const Point& x) {
    return {0.0, 2.0 * x[2] - alpha * x[0] * x[2], alpha * x[0] * x[1]};
}

SymTensor3 affine_w_strain(double alpha, const Point& x) {
    return SymTensor3(0, 0, 0, -0.5 * alpha * x[2], 0.5 * alpha * x[1], 1.0);
}

EnergyBreakdown affine_w_energy(double alpha, double eps) {
    // int over the cube of alpha^2 (x2^2 + x3^2)/2 = (8/3) alpha^2
    return EnergyBreakdown::make((8.0 / 3.0) * alpha * alpha, 0.0, eps, 0.0);
}

Vec3 neumann_affine_u(double t, const Point& x) {
    return {t * x[1] * x[2], 2.0 * x[2], 0.0};
}

SymTensor3 neumann_affine_strain(double t, const Point& x) {
    return SymTensor3(0, 0, 0, 0.5 * t * x[2], 0.5 * t * x[1], 1.0);
}

double neumann_affine_elastic(double t) { return (8.0 / 3.0) * t * t; }
double neumann_affine_m_prime(double t) { return (8.0 / 3.0) * t; }
double neumann_affine_best_t(double gamma) { return 0.5 * gamma; }
double neumann_affine_objective(double gamma) { return -(2.0 / 3.0) * gamma * gamma; }

// ---------------------------------------------------------------------------

DisplacementField sample_u_star(GridSpec grid, double alpha) {
    return sample_displacement(grid, [alpha](const Point& p) { return u_star(alpha, p); });
}

std::pair<DisplacementField, SignField> sample_laminate(GridSpec grid, const LaminateParams& p) {
    DisplacementField u =
        sample_displacement(grid, [&p](const Point& x) { return laminate_u(p, x); });
    return {std::move(u), sample_laminate_sign(grid, p)};
}

SignField sample_laminate_sign(GridSpec grid, const LaminateParams& p) {
    SignField s(grid);
    for (int i = 0; i < grid.N; ++i)
        for (int j = 0; j < grid.N; ++j)
            for (int k = 0; k < grid.N; ++k)
                s.at(i, j, k) = static_cast<std::int8_t>(
                    laminate_sign(p, {grid.xc(i), grid.xc(j), grid.xc(k)}));
    return s;
}

}  // namespace twinlab
