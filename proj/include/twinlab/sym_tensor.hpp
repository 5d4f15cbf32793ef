#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace twinlab {

inline constexpr double kInfiniteEnergy = std::numeric_limits<double>::infinity();

/// Symmetric 3x3 strain tensor. Off-diagonal entries are stored once and
/// carry weight 2 in Frobenius-type norms.
struct SymTensor3 {
    double e11 = 0.0, e22 = 0.0, e33 = 0.0;
    double e12 = 0.0, e13 = 0.0, e23 = 0.0;

    SymTensor3() = default;
    SymTensor3(double a11, double a22, double a33, double a12, double a13, double a23)
        : e11(a11), e22(a22), e33(a33), e12(a12), e13(a13), e23(a23) {
        if (!(std::isfinite(e11) && std::isfinite(e22) && std::isfinite(e33) &&
              std::isfinite(e12) && std::isfinite(e13) && std::isfinite(e23)))
            throw std::invalid_argument("SymTensor3: non-finite component");
    }

    /// The stress-free strain of the variant with shear sign s: s * (e2 (x) e3 + e3 (x) e2)/... ,
    /// i.e. e23 = s and all other components zero.
    static SymTensor3 well(int s) { return SymTensor3(0, 0, 0, 0, 0, static_cast<double>(s)); }

    double frobenius_sq() const {
        return e11 * e11 + e22 * e22 + e33 * e33 +
               2.0 * (e12 * e12 + e13 * e13 + e23 * e23);
    }
};

enum class EnergyModel { HardConstraint, QuasiconvexEnvelope, TwoWellQuadratic };

/// The e23-independent part of the elastic density, shared by all three models.
/// Summation order is fixed so independent evaluations agree bit-for-bit.
inline double base_density(const SymTensor3& xi) {
    return xi.e11 * xi.e11 + xi.e22 * xi.e22 + xi.e33 * xi.e33 +
           2.0 * xi.e12 * xi.e12 + 2.0 * xi.e13 * xi.e13;
}

/// Constrained density: finite only where |e23| = 1 exactly (tolerance 0; meant
/// for analytically constructed strains, not grid-sampled ones).
inline double eval_W(const SymTensor3& xi) {
    if (std::abs(xi.e23) != 1.0) return kInfiniteEnergy;
    return base_density(xi);
}

/// Convex envelope of W: finite on |e23| <= 1.
inline double eval_W_qc(const SymTensor3& xi) {
    if (std::abs(xi.e23) > 1.0) return kInfiniteEnergy;
    return base_density(xi);
}

struct TwoWellValue {
    double value;
    int best_sign;  // minimizing variant; tie at e23 = 0 resolved to +1
};

/// Squared distance to the nearer of the two wells,
///   min_{s=+-1} |xi - s*E23|^2 = base + 2(|e23| - 1)^2.
inline TwoWellValue eval_W_twowell(const SymTensor3& xi) {
    const double d = std::abs(xi.e23) - 1.0;
    return {base_density(xi) + 2.0 * d * d, xi.e23 < 0.0 ? -1 : +1};
}

/// Two-well density with the variant prescribed: base + 2(e23 - s)^2.
inline double eval_W_twowell_signed(const SymTensor3& xi, double s) {
    const double d = xi.e23 - s;
    return base_density(xi) + 2.0 * d * d;
}

}  // namespace twinlab
