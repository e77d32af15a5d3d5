#include "cbnet/samples.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace cbnet {

void SampleSpec::validate() const {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw std::invalid_argument("sample step must be positive");
    }
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("sample extent must be at least 1x1");
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw std::invalid_argument("sample radius must be positive");
    }
    for (double v : {k0, l0, xi, eta, shift}) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("sample offsets must be finite");
        }
    }
}

MoebiusTransform stereographic_inversion() { return MoebiusTransform::sphere_inversion({0.0, 0.0, 1.0}, 2.0); }

SphereCongruence planar_gauss_congruence(const SampleSpec& spec) {
    spec.validate();
    if (spec.kind != SampleKind::enneper_gauss && spec.kind != SampleKind::catenoid_gauss) {
        throw std::invalid_argument("planar congruence exists only for the Gauss kinds");
    }
    using cd = std::complex<double>;
    const cd rot = std::polar(1.0, std::numbers::pi / 4.0);
    const double d = spec.eps / std::numbers::sqrt2;
    const double c = 1.0 - std::cos(d) / std::cosh(d);
    std::vector<SphereOrPlane> members;
    members.reserve(static_cast<std::size_t>(spec.rows) * spec.cols);
    for (int l = 0; l < spec.cols; ++l) {
        for (int k = 0; k < spec.rows; ++k) {
            const cd w = spec.eps * rot * cd(k + spec.k0 + spec.xi, l + spec.l0 + spec.eta);
            if (spec.kind == SampleKind::enneper_gauss) {
                members.push_back(SphereOrPlane::sphere({w.real(), w.imag(), 0.0}, 0.5 * spec.eps * spec.eps));
            } else {
                const cd z = std::exp(w + spec.shift);
                members.push_back(SphereOrPlane::sphere({z.real(), z.imag(), 0.0}, c * std::norm(z)));
            }
        }
    }
    return SphereCongruence(spec.rows, spec.cols, std::move(members));
}

QuadNet generate(const SampleSpec& spec) {
    spec.validate();
    if (spec.kind == SampleKind::enneper_gauss || spec.kind == SampleKind::catenoid_gauss) {
        const SphereCongruence planar = planar_gauss_congruence(spec);
        const MoebiusTransform T = stereographic_inversion();
        if (spec.mode == GaussMode::exact) {
            return apply_moebius(T, planar).net;
        }
        QuadNet net(spec.rows, spec.cols);
        for (int l = 0; l < spec.cols; ++l) {
            for (int k = 0; k < spec.rows; ++k) {
                const Vec3 z = planar(k, l).as_sphere().center;
                net(k, l) = T.apply(SphereOrPlane::point(z)).as_sphere().center;
            }
        }
        return net;
    }
    QuadNet net(spec.rows, spec.cols);
    const double R = spec.radius;
    const double h = 2.0 * R * std::sin(0.5 * spec.eps);
    for (int l = 0; l < spec.cols; ++l) {
        for (int k = 0; k < spec.rows; ++k) {
            const double x = spec.eps * (k + spec.k0);
            const double y = spec.eps * (l + spec.l0);
            switch (spec.kind) {
            case SampleKind::square_grid: net(k, l) = {x, y, 0.0}; break;
            case SampleKind::paraboloid: net(k, l) = {x, y, 0.5 * (x * x + y * y)}; break;
            case SampleKind::sphere_graticule:
                net(k, l) = R * Vec3(std::cos(x) * std::cos(y), std::sin(x) * std::cos(y), std::sin(y));
                break;
            case SampleKind::cylinder: net(k, l) = {R * std::cos(x), R * std::sin(x), h * (l + spec.l0)}; break;
            default: break;
            }
        }
    }
    return net;
}

std::optional<SampleKind> parse_sample_kind(std::string_view name) {
    for (SampleKind k : {SampleKind::square_grid, SampleKind::paraboloid, SampleKind::sphere_graticule,
                         SampleKind::cylinder, SampleKind::enneper_gauss, SampleKind::catenoid_gauss}) {
        if (sample_kind_name(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

std::string sample_kind_name(SampleKind kind) {
    switch (kind) {
    case SampleKind::square_grid: return "square_grid";
    case SampleKind::paraboloid: return "paraboloid";
    case SampleKind::sphere_graticule: return "sphere_graticule";
    case SampleKind::cylinder: return "cylinder";
    case SampleKind::enneper_gauss: return "enneper_gauss";
    case SampleKind::catenoid_gauss: return "catenoid_gauss";
    }
    return "unknown";
}

}  // namespace cbnet
