#include "cbnet/isothermic.hpp"

#include "cbnet/curvature.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbnet {

IsothermicVerdict is_isothermic(const Checkerboard& cbp, const Tolerances& tol) {
    IsothermicVerdict v;
    v.principal = classify(cbp, tol);
    v.koenigs = is_koenigs(cbp, tol);
    v.is_isothermic = v.principal.principal && v.koenigs.is_koenigs;
    return v;
}

namespace {

std::vector<double> base_radii(const QuadNet& net, double tol) {
    const SphereCongruence c = build_congruence(net, 0.0, tol);
    std::vector<double> r2;
    r2.reserve(net.size());
    for (const auto& m : c.members()) {
        r2.push_back(m.as_sphere().r2);
    }
    return r2;
}

double parity(std::size_t i, int rows) {
    const int k = static_cast<int>(i % static_cast<std::size_t>(rows));
    const int l = static_cast<int>(i / static_cast<std::size_t>(rows));
    return (k + l) % 2 == 0 ? 1.0 : -1.0;
}

}  // namespace

UnitSphereFit on_unit_sphere(const QuadNet& net, double tol) {
    if (net.empty()) {
        throw GeometryError("empty net");
    }
    const std::vector<double> c = base_radii(net, tol);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double b = parity(i, net.rows()) * (net.vertices()[i].squaredNorm() - 1.0 - c[i]);
        lo = std::min(lo, b);
        hi = std::max(hi, b);
    }
    UnitSphereFit fit;
    fit.r0sq = 0.5 * (lo + hi);
    fit.residual = 0.5 * (hi - lo);
    fit.on_sphere = fit.residual <= tol;
    return fit;
}

double unit_sphere_residual(const QuadNet& net, double r0sq) {
    const std::vector<double> c = base_radii(net, std::numeric_limits<double>::infinity());
    double worst = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double r2 = parity(i, net.rows()) * r0sq + c[i];
        worst = std::max(worst, std::abs(net.vertices()[i].squaredNorm() - r2 - 1.0));
    }
    return worst;
}

MinimalResult minimal_from_gauss(const QuadNet& gauss, std::optional<std::array<double, 2>> seeds,
                                 const Tolerances& tol) {
    tol.validate();
    const Checkerboard cbp = build_checkerboard(gauss);
    const IsothermicVerdict iso = is_isothermic(cbp, tol);
    if (!iso.is_isothermic) {
        throw GeometryError("Gauss net is not isothermic",
                            std::max(iso.principal.orthogonality_residual, iso.koenigs.max_laplace_residual));
    }
    const UnitSphereFit fit = on_unit_sphere(gauss, tol.orth);
    if (!fit.on_sphere) {
        throw GeometryError("Möbius representation of the Gauss net does not meet S^2 orthogonally",
                            fit.residual);
    }
    MinimalResult out;
    out.gauss = gauss;
    out.seeds = seeds ? *seeds : smooth_dual_seed(cbp, Orientation::reversing);
    out.koenigs_residual = iso.koenigs.max_laplace_residual;
    out.sphere_residual = fit.residual;
    out.r0sq = fit.r0sq;

    DualizationResult d = dualize(cbp, out.seeds[0], out.seeds[1], Orientation::reversing, tol.koenigs);
    out.surface = reconstruct_control_smooth(d.dual, tol.par);
    out.dual = std::move(d.dual);
    out.dual.set_control(out.surface);
    out.scales = std::move(d.scales);
    out.closure_residual = d.closure_residual;

    for (int l = 0; l + 1 < gauss.cols(); ++l) {
        for (int k = 0; k + 1 < gauss.rows(); ++k) {
            const EdgeVectors en = face_edge_vectors(control_face(gauss, {k, l}));
            const EdgeVectors ef = face_edge_vectors(control_face(out.surface, {k, l}));
            const double ku = en.du.dot(ef.du) / ef.du.squaredNorm();
            const double kv = en.dv.dot(ef.dv) / ef.dv.squaredNorm();
            out.kappa.push_back({std::max(ku, kv), std::min(ku, kv)});
            const double m = std::max(std::abs(ku), std::abs(kv));
            if (m > 0.0) {
                out.mean_curvature_residual = std::max(out.mean_curvature_residual, std::abs(ku + kv) / m);
            }
        }
    }
    return out;
}

MinimalResult goursat(const MinimalResult& surface, const MoebiusTransform& T,
                      std::optional<std::array<double, 2>> seeds, const Tolerances& tol) {
    const SphereCongruence cong = build_congruence(surface.gauss, surface.r0sq, tol.orth);
    const MoebiusImage img = apply_moebius(T, cong);
    const UnitSphereFit fit = on_unit_sphere(img.net, tol.orth);
    if (!fit.on_sphere) {
        throw GeometryError("transformed Gauss net no longer meets S^2 orthogonally", fit.residual);
    }
    return minimal_from_gauss(img.net, seeds, tol);
}

Alignment align_similarity(const QuadNet& source, const QuadNet& target, bool allow_reflection) {
    if (source.size() != target.size() || source.empty()) {
        throw std::invalid_argument("alignment needs two nets with the same nonzero vertex count");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(source.size());
    Eigen::Matrix3Xd src(3, n);
    Eigen::Matrix3Xd dst(3, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        src.col(i) = source.vertices()[static_cast<std::size_t>(i)];
        dst.col(i) = target.vertices()[static_cast<std::size_t>(i)];
    }
    auto fit = [&](const Eigen::Matrix3Xd& s, Eigen::Matrix4d& T) {
        T = Eigen::umeyama(s, dst, true);
        const Eigen::Matrix3Xd mapped = (T.topLeftCorner<3, 3>() * s).colwise() + T.topRightCorner<3, 1>();
        return std::sqrt((mapped - dst).colwise().squaredNorm().mean());
    };
    Alignment out;
    out.rms = fit(src, out.transform);
    if (allow_reflection) {
        Eigen::Matrix4d mirror = Eigen::Matrix4d::Identity();
        mirror(0, 0) = -1.0;
        Eigen::Matrix3Xd flipped = src;
        flipped.row(0) *= -1.0;
        Eigen::Matrix4d T;
        const double rms = fit(flipped, T);
        if (rms < out.rms) {
            out.rms = rms;
            out.transform = T * mirror;
            out.reflected = true;
        }
    }
    std::vector<Vec3> mapped(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
        mapped[i] = out.transform.topLeftCorner<3, 3>() * source.vertices()[i] + out.transform.topRightCorner<3, 1>();
    }
    out.aligned = QuadNet(source.rows(), source.cols(), std::move(mapped));
    const Vec3 centroid = dst.rowwise().mean();
    const double spread = std::sqrt((dst.colwise() - centroid).colwise().squaredNorm().mean());
    out.relative_rms = spread > 0.0 ? out.rms / spread : out.rms;
    return out;
}

}  // namespace cbnet
