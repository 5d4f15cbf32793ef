#pragma once

#include <string>
#include <vector>

#include "twinlab/constructions.hpp"
#include "twinlab/fields.hpp"
#include "twinlab/grid.hpp"

namespace twinlab {

struct ProblemSpec {
    BoundaryCondition bc;
    double eps;
    GridSpec grid;
    EnergyModel model = EnergyModel::TwoWellQuadratic;

    ProblemSpec(BoundaryCondition b, double e, GridSpec g)
        : bc(b), eps(e), grid(g) {
        if (!(e > 0.0)) throw std::invalid_argument("ProblemSpec: eps must be > 0");
    }
};

struct SolverConfig {
    double cg_rel_tol = 1e-8;
    long cg_max_iters = 0;       // 0 -> 10 N^3
    int outer_max = 200;
    std::vector<SignField> seeds;  // empty -> default seed set
    unsigned long rng_seed = 0;
    int threads = 0;             // 0 -> hardware/TWINLAB_THREADS
};

struct SolveResult {
    DisplacementField u;
    SignField s;
    EnergyBreakdown energy;
    std::vector<double> trace;  // per-outer-iteration totals, non-increasing
    bool converged = false;
};

struct ElasticSolve {
    DisplacementField u;
    bool converged = false;
    long iterations = 0;
};

/// Minimize the quadratic two-well energy (plus the Neumann load term) over u
/// with the Dirichlet rows pinned, by conjugate gradients on the trilinear
/// finite-element form of the same functional. The returned field satisfies
/// the boundary condition exactly; non-convergence is flagged, the best
/// iterate is still returned.
ElasticSolve solve_elastic(const SignField& s, const ProblemSpec& problem,
                           const DisplacementField& u0, const SolverConfig& config = {});

/// Coordinate descent (ICM) on 2 integral (e23 - s)^2 + eps TV(s) at frozen u:
/// lexicographic sweeps, flip when the move strictly decreases the energy,
/// ties keep the current sign, stop on the first flip-free sweep. With
/// x2_invariant set, whole x2-columns flip as one unit.
SignField update_signs(const DisplacementField& u, const SignField& s, double eps,
                       bool x2_invariant = false);

/// Alternating minimization over the default or supplied seeds; returns the
/// best seed's result. The recorded trace never increases.
SolveResult minimize(const ProblemSpec& problem, const SolverConfig& config = {});

/// Default multi-start seeds: constant +-1 and laminate sign fields with
/// n in {1, 2, n_opt}.
std::vector<SignField> default_seeds(const ProblemSpec& problem);

struct FamilyResult {
    std::string winner;  // "laminate" or "affine"
    LaminateParams params;  // valid when winner == "laminate"
    double t = 0.0;         // affine parameter: w-alpha for Dirichlet, t for Neumann
    EnergyBreakdown energy; // analytic values; total includes the load term
    DisplacementField u;    // winner sampled on problem.grid
    SignField s;
};

/// Exact search over the closed-form construction families (no grid solves):
/// Dirichlet: laminates with n in {1..4 n_opt}, both variants, plus the affine
/// map w for LeftRight; Neumann: the affine family at its optimal t and
/// laminates at alpha = -sign(gamma) (alpha = +1 when gamma < 0).
FamilyResult family_search(const ProblemSpec& problem);

}  // namespace twinlab
