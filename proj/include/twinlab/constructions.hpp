#pragma once

#include <utility>
#include <vector>

#include "twinlab/fields.hpp"
#include "twinlab/grid.hpp"
#include "twinlab/sym_tensor.hpp"

namespace twinlab {

/// Continuous piecewise-linear function given by breakpoints; used for the
/// profile psi of the zero-energy family and for 1-D bump test functions.
struct PiecewiseLinear {
    std::vector<double> x;  // strictly increasing breakpoints
    std::vector<double> y;

    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<double> xs, std::vector<double> ys);

    double operator()(double t) const;     // constant extension outside [x.front(), x.back()]
    double slope(std::size_t seg) const;   // slope on segment [x[seg], x[seg+1])
    std::size_t segments() const { return x.empty() ? 0 : x.size() - 1; }
    double lipschitz() const;              // max |slope|
    double l1_norm() const;                // integral of |f| over [x.front(), x.back()]
    double l2_norm_sq() const;             // integral of f^2
    double slope_l2_norm_sq() const;       // integral of f'^2
};

// ---------------------------------------------------------------------------
// The relaxed minimizer u*(x) = alpha (-x2 x3, x1 x3, x1 x2) and the
// zero-relaxed-energy family u = alpha u* + (d x2 + c, -d x1 + psi(x3), 0).
// ---------------------------------------------------------------------------

Vec3 u_star(double alpha, const Point& p);
SymTensor3 u_star_strain(double alpha, const Point& p);  // e23 = alpha x1, rest 0

struct RelaxedFamilyParams {
    double alpha = 0.0;
    double c = 0.0;
    double d = 0.0;
    PiecewiseLinear psi;  // Lip(psi) <= 2(1-|alpha|), checked on breakpoints

    void validate() const;  // throws std::invalid_argument on Lipschitz violation
};

Vec3 relaxed_family(const RelaxedFamilyParams& p, const Point& x);
SymTensor3 relaxed_family_strain(const RelaxedFamilyParams& p, const Point& x);

/// Exact W^qc energy of the family field for an arbitrary profile (no Lipschitz
/// check): 0 when every segment satisfies |alpha| + |slope|/2 <= 1, +inf
/// otherwise. The strain is piecewise constant in x3 and affine in x1, so the
/// supremum of |e23| is attained at x1 = +-1 segment by segment.
double relaxed_family_energy_qc(double alpha, const PiecewiseLinear& psi);

// ---------------------------------------------------------------------------
// Variable-volume-fraction laminates: 2n slabs in x3 of thickness delta = 1/n,
// oblique twin interfaces x3 = f_k(x1) inside each slab. The symmetric variant
// reflects odd slabs so e23 is continuous across slab boundaries.
// ---------------------------------------------------------------------------

struct LaminateParams {
    double alpha = 1.0;     // in [-1,1]
    int n = 1;              // slabs per unit length; delta = 1/n
    bool symmetric = true;  // reflected construction (default)

    double delta() const { return 1.0 / n; }
    void validate() const;
};

/// Interface height within slice k: always in [k delta, (k+1) delta].
double laminate_interface(const LaminateParams& p, int k, double x1);

Vec3 laminate_u(const LaminateParams& p, const Point& x);
int laminate_sign(const LaminateParams& p, const Point& x);
SymTensor3 laminate_strain(const LaminateParams& p, const Point& x);

/// ceil((alpha^2 / eps)^(1/3)), at least 1.
int laminate_optimal_n(double alpha, double eps);

/// Exact piecewise integrals: elastic = (4/3) alpha^2 (1 + alpha^2) delta^2
/// (accumulated slice by slice); surface = 2 x interface area, i.e.
/// 8 n sqrt(4 + alpha^2 delta^2) plus 8(2n-1) of vertical joins when plain.
EnergyBreakdown analytic_energy_laminate(const LaminateParams& p, double eps);

/// M'(laminate) = -(8/3) alpha, from the shared trace u1 = -alpha x2 x3.
double laminate_m_prime(const LaminateParams& p);

// ---------------------------------------------------------------------------
// Microstructure-free comparison maps.
// ---------------------------------------------------------------------------

/// w(x) = (0, 2 x3 - alpha x1 x3, alpha x1 x2): e23 = 1 everywhere,
/// W(e(w)) = alpha^2 (x2^2 + x3^2)/2 <= alpha^2, zero surface energy.
Vec3 affine_w(double alpha, const Point& x);
SymTensor3 affine_w_strain(double alpha, const Point& x);
EnergyBreakdown affine_w_energy(double alpha, double eps);  // elastic = 8 alpha^2 / 3

/// u_t(x) = (t x2 x3, 2 x3, 0): e23 = 1 for every t; elastic = (8/3) t^2,
/// M'(u_t) = (8/3) t. The family objective (8/3)t^2 - gamma (8/3) t is
/// minimized at t = gamma/2 with value -(2/3) gamma^2.
Vec3 neumann_affine_u(double t, const Point& x);
SymTensor3 neumann_affine_strain(double t, const Point& x);
double neumann_affine_elastic(double t);
double neumann_affine_m_prime(double t);
double neumann_affine_best_t(double gamma);
double neumann_affine_objective(double gamma);

// ---------------------------------------------------------------------------
// Grid sampling.
// ---------------------------------------------------------------------------

DisplacementField sample_u_star(GridSpec grid, double alpha);
std::pair<DisplacementField, SignField> sample_laminate(GridSpec grid, const LaminateParams& p);
SignField sample_laminate_sign(GridSpec grid, const LaminateParams& p);

}  // namespace twinlab
