#pragma once

#include "cbnet/koenigs.hpp"
#include "cbnet/moebius.hpp"

#include <array>
#include <optional>
#include <vector>

namespace cbnet {

struct IsothermicVerdict {
    Classification principal;
    KoenigsVerdict koenigs;
    bool is_isothermic = false;
};

/// Principal and Koenigs. Throws GeometryError where is_koenigs does, i.e.
/// on non-conjugate input.
IsothermicVerdict is_isothermic(const Checkerboard& cbp, const Tolerances& tol = {});

struct UnitSphereFit {
    bool on_sphere = false;
    double residual = 0.0;  // min over r0sq of max | |f|^2 - r^2 - 1 |
    double r0sq = 0.0;      // minimizer
};

/// Over the one-parameter family of Möbius representations, the member whose
/// spheres come closest to meeting S^2 orthogonally. Squared radii alternate
/// r^2(k,l) = (-1)^(k+l) r0sq + c(k,l), so the optimum is a midrange.
/// Throws GeometryError on a non-orthogonal pattern.
UnitSphereFit on_unit_sphere(const QuadNet& net, double tol = 1e-8);

/// max | |f|^2 - r^2 - 1 | for the congruence with r^2(0,0) = r0sq.
double unit_sphere_residual(const QuadNet& net, double r0sq);

struct MinimalResult {
    QuadNet surface;
    QuadNet gauss;
    Checkerboard dual;                          // checkerboard of the surface
    std::vector<double> scales;                 // dual scale per face
    std::array<double, 2> seeds{1.0, 1.0};
    std::vector<std::array<double, 2>> kappa;   // per face (kappa1 >= kappa2)
    double mean_curvature_residual = 0.0;       // max |k1 + k2| / max(|k1|, |k2|)
    double koenigs_residual = 0.0;              // of the Gauss net
    double sphere_residual = 0.0;               // on_unit_sphere residual of the Gauss net
    double closure_residual = 0.0;              // of the dualization
    double r0sq = 0.0;                          // Möbius representation used for the Gauss net
};

/// Dualizes the checkerboard of an isothermic net whose Möbius representation
/// meets S^2 orthogonally and returns the smoothest control net of the dual.
/// Seeds default to smooth_dual_seed. Curvatures are the signed scale factors
/// <d n, d f> / |d f|^2 along du and dv.
MinimalResult minimal_from_gauss(const QuadNet& gauss, std::optional<std::array<double, 2>> seeds = std::nullopt,
                                 const Tolerances& tol = {});

/// Applies T to the Gauss congruence, rechecks the preconditions and
/// dualizes again.
MinimalResult goursat(const MinimalResult& surface, const MoebiusTransform& T,
                      std::optional<std::array<double, 2>> seeds = std::nullopt, const Tolerances& tol = {});

struct Alignment {
    QuadNet aligned;          // source mapped onto target
    Eigen::Matrix4d transform;
    bool reflected = false;
    double rms = 0.0;         // sqrt(mean |T(source) - target|^2)
    double relative_rms = 0.0;  // rms / rms spread of target about its centroid
};

/// Least-squares similarity (rotation, uniform scale, translation) taking
/// source to target; with allow_reflection the mirrored fit is tried too.
Alignment align_similarity(const QuadNet& source, const QuadNet& target, bool allow_reflection = true);

}  // namespace cbnet
