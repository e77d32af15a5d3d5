#pragma once

#include "cbnet/moebius.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace cbnet {

enum class SampleKind { square_grid, paraboloid, sphere_graticule, cylinder, enneper_gauss, catenoid_gauss };

/// exact: centers of the stereographic image of an orthogonal planar
/// congruence, an exact isothermic net. pointwise: stereographic images of
/// the lattice points.
enum class GaussMode { exact, pointwise };

/// Vertex (k,l), 0 <= k < rows, 0 <= l < cols, samples parameters
///   x = eps (k + k0), y = eps (l + l0)
/// for the surface kinds:
///   square_grid       (x, y, 0)
///   paraboloid        (x, y, (x^2 + y^2) / 2)
///   sphere_graticule  radius (cos x cos y, sin x cos y, sin y)
///   cylinder          (radius cos x, radius sin x, h (l + l0)), h = 2 radius sin(eps/2)
/// The Gauss kinds use the lattice
///   w = eps e^(i pi/4) ((k + k0 + xi) + i (l + l0 + eta))
///   enneper_gauss     z = w,        r^2 = eps^2 / 2
///   catenoid_gauss    z = e^(w + shift), r^2 = (1 - cos d / cosh d) |z|^2, d = eps / sqrt 2
/// and map the planar congruence (z, r^2) by the inversion in the sphere
/// about (0,0,1) with squared radius 2, which takes the plane z = 0 to S^2.
struct SampleSpec {
    SampleKind kind = SampleKind::square_grid;
    double eps = 1.0;
    int rows = 5;
    int cols = 5;
    double k0 = 0.0;
    double l0 = 0.0;
    double xi = 0.5;
    double eta = 0.5;
    double radius = 1.0;
    double shift = 1.0;
    GaussMode mode = GaussMode::exact;

    void validate() const;
};

QuadNet generate(const SampleSpec& spec);

/// Planar lattice congruence of a Gauss kind before the inversion.
SphereCongruence planar_gauss_congruence(const SampleSpec& spec);

/// Inversion taking the plane z = 0 to the unit sphere.
MoebiusTransform stereographic_inversion();

std::optional<SampleKind> parse_sample_kind(std::string_view name);
std::string sample_kind_name(SampleKind kind);

}  // namespace cbnet
