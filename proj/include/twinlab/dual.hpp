#pragma once

#include <vector>

#include "twinlab/constructions.hpp"
#include "twinlab/fields.hpp"
#include "twinlab/grid.hpp"

namespace twinlab {

/// Slice test function on the (x2,x3) square: vertex samples, zero on the
/// boundary exactly, with cached cell-centered gradients.
struct TestFunction2D {
    int N;
    double h;
    std::vector<double> eta;  // (N+1)^2 vertex values, index j*(N+1)+k
    std::vector<double> d2;   // N^2 cell-centered d eta / dx2
    std::vector<double> d3;   // N^2 cell-centered d eta / dx3

    TestFunction2D(int n, std::vector<double> vertex_values);

    double at(int j, int k) const { return eta[static_cast<std::size_t>(j) * (N + 1) + k]; }
    static TestFunction2D zero(int n);
    TestFunction2D scaled(double lambda) const;
};

/// Intermediates of the test-function construction on one slice.
struct SliceData {
    double x1_star = 0.0;
    std::vector<double> phi;   // per x3-cell: x2-average of (d2 u3 - d3 u2)
    std::vector<double> beta;  // x3-vertex antiderivative of phi, zero mean
    std::vector<double> eta0;  // antiderivative of beta, eta0(-1) = 0 = eta0(+1)
    double c_star = 0.0;
};

struct DualReport {
    double value = 0.0;   // A - B, the certified lower bound for this eta
    double A = 0.0;       // slice integral of (d2 u3 - d3 u2) eta
    double B = 0.0;       // (1/2)(x1*+1) integral of |D eta|^2
    double tol = 0.0;     // C_tol h (1 + |D eta|_2^2) + |remainder|
    double remainder = 0.0;  // exactly computed summation-by-parts defect
    double x1_star = 0.0;
    int slice_layer = 0;
};

struct EtaBuild {
    TestFunction2D eta;
    SliceData slice;
    double C_theta = 0.0;
    double gamma = 0.0;
};

struct BestSliceResult {
    double x1_star = 0.0;
    double bound = 0.0;   // after the optimal lambda rescaling
    double lambda = 0.0;
    double tol = 0.0;
    DualReport report;    // at the optimal slice, before rescaling
};

/// Triangle bump on (-1/2, 1/2) with unit L1 norm.
PiecewiseLinear default_theta();

/// The duality slice bound
///   integral over (-1,1)^2 of (d2 u3 - d3 u2)(x1*,.,.) eta - (1/2)(x1*+1)|D eta|^2
/// by cell quadrature at the cell-center plane nearest to x1_star. Certified
/// contract: value <= elastic_energy(u, TwoWellQuadratic, s = sign(e23)) + tol.
/// Requires the TopBottom rows to hold exactly; throws otherwise.
double dual_bound(const DisplacementField& u, const TestFunction2D& eta, double x1_star);
DualReport dual_bound_report(const DisplacementField& u, const TestFunction2D& eta, double x1_star);

/// Automatic test function from the proof construction: phi -> beta (zero mean
/// via c*) -> eta0, then eta = gamma theta(x2) eta0(x3) with gamma = 1/(2 C_theta),
/// C_theta = |theta|_2^2 + 4 |theta'|_2^2 computed from theta exactly.
EtaBuild build_eta(const DisplacementField& u, double x1_star,
                   const PiecewiseLinear& theta = default_theta());

/// Scan the cell-center planes x1* in (-1/4, 1/4) with auto-built eta and the
/// optimal lambda rescaling; returns the best certified bound.
BestSliceResult best_slice_bound(const DisplacementField& u,
                                 const PiecewiseLinear& theta = default_theta());

}  // namespace twinlab
