#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "twinlab/grid.hpp"
#include "twinlab/sym_tensor.hpp"

namespace twinlab {

using Vec3 = std::array<double, 3>;
using Point = std::array<double, 3>;

/// Deterministic pairwise tree reduction over a fixed (lexicographic) ordering.
double pairwise_sum(std::span<const double> v);

/// Cell-centered strain from the eight surrounding vertices: each du_i/dx_j is
/// the average of the four edge differences along axis j divided by h. Exact
/// for fields whose components are multilinear in the coordinates.
SymTensor3 strain(const DisplacementField& u, int ci, int cj, int ck);

/// Integral of the chosen density over the cube, midpoint (cell-centered) rule.
/// Under TwoWellQuadratic a sign field replaces 2(|e23|-1)^2 by 2(e23-s)^2.
/// HardConstraint returns +inf as soon as one cell violates |e23| = 1 exactly.
double elastic_energy(const DisplacementField& u, const SignField* s, EnergyModel model);

/// Integral of (e23 - s)^2, the coupling mismatch diagnostic.
double constraint_violation(const DisplacementField& u, const SignField& s);

/// Anisotropic (Manhattan) discrete total variation of the sign field:
/// sum over interior faces of |s - s'| h^2; each interface face contributes 2 h^2.
double surface_energy(const SignField& s);

/// Sign of the cell-centered e23; ties (e23 == 0) resolve to +1.
SignField sign_of_e23(const DisplacementField& u);

/// Boundary load functional: trapezoidal quadrature over (-1,1)^2 of
/// x2 (u1(x1,x2,1) - u1(x1,x2,-1)).
double m_prime(const DisplacementField& u);

/// Same functional evaluated from a pointwise displacement by tensor-product
/// two-point Gauss quadrature; exact for traces polynomial of degree <= 3 per
/// variable, hence exact for every closed-form construction in this project.
double m_prime_exact(const std::function<Vec3(const Point&)>& u, int cells_per_axis = 16);

/// Overwrite the Dirichlet rows. TopBottom: u2,u3 on the faces x1 = +-1 with
/// +-x3, +-x2. LeftRight(alpha): u3 on the faces x3 = +-1 with alpha x1 x2.
/// Neumann: identity. Idempotent.
DisplacementField apply_bc(const DisplacementField& u, const BoundaryCondition& bc);

/// True if u satisfies the Dirichlet rows of bc to within tol at every pinned vertex.
bool satisfies_bc(const DisplacementField& u, const BoundaryCondition& bc, double tol = 1e-12);

/// Full breakdown; load = -gamma m_prime(u) for Neumann, 0 otherwise.
EnergyBreakdown total_energy(const DisplacementField& u, const SignField& s, double eps,
                             const BoundaryCondition& bc,
                             EnergyModel model = EnergyModel::TwoWellQuadratic);

/// Sample a pointwise displacement onto the grid vertices.
DisplacementField sample_displacement(GridSpec grid, const std::function<Vec3(const Point&)>& u);

}  // namespace twinlab
