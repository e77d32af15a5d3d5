#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cbnet/moebius.hpp"
#include "cbnet/samples.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <cmath>

using namespace cbnet;
using namespace cbtest;

namespace {

MinkowskiVector mv(double a, double b, double c, double d, double e) {
    MinkowskiVector v;
    v << a, b, c, d, e;
    return v;
}

QuadNet grid(int rows, int cols, double shear = 0.0) {
    QuadNet net(rows, cols);
    for (int l = 0; l < cols; ++l) {
        for (int k = 0; k < rows; ++k) {
            net(k, l) = Vec3(k + shear * l, l, 0.0);
        }
    }
    return net;
}

double mean_edge_sq(const QuadNet& net) {
    double s = 0.0;
    int n = 0;
    for (int l = 0; l < net.cols(); ++l) {
        for (int k = 0; k < net.rows(); ++k) {
            if (k + 1 < net.rows()) {
                s += (net(k + 1, l) - net(k, l)).norm();
                ++n;
            }
            if (l + 1 < net.cols()) {
                s += (net(k, l + 1) - net(k, l)).norm();
                ++n;
            }
        }
    }
    return (s / n) * (s / n);
}

SphereOrPlane random_sphere(Rng& rng) {
    return SphereOrPlane::sphere(gaussian_vec(rng, 2.0), uniform(rng, -2.0, 4.0));
}

void check_same_sphere(const SphereOrPlane& a, const Vec3& c, double r2, double tol) {
    REQUIRE(a.is_sphere());
    const double scale = 1.0 + c.norm() + std::abs(r2);
    CHECK((a.as_sphere().center - c).norm() <= tol * scale);
    CHECK(std::abs(a.as_sphere().r2 - r2) <= tol * scale * scale);
}

}  // namespace

TEST_CASE("Minkowski inner product") {
    CHECK(minkowski_inner(basis_vector(5), basis_vector(5)) == -1.0);
    for (int i = 1; i <= 4; ++i) {
        CHECK(minkowski_inner(basis_vector(i), basis_vector(i)) == 1.0);
    }
    CHECK(minkowski_inner(basis_vector(1), basis_vector(5)) == 0.0);
    CHECK(minkowski_inner(e_zero(), e_zero()) == 0.0);
    CHECK(minkowski_inner(e_infinity(), e_infinity()) == 0.0);
    CHECK(minkowski_inner(e_zero(), e_infinity()) == -0.5);

    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        MinkowskiVector a = MinkowskiVector::Random();
        MinkowskiVector b = MinkowskiVector::Random();
        CHECK(minkowski_inner(a, b) == doctest::Approx(a.dot(minkowski_metric() * b)).epsilon(1e-14));
        CHECK(minkowski_inner(a, b) == minkowski_inner(b, a));
        const LightConeCoordinates lc = light_cone_coordinates(a);
        CHECK((from_light_cone_coordinates(lc.x, lc.lambda, lc.mu) - a).norm() <= 1e-14);
    }
}

TEST_CASE("lift") {
    CHECK(projectively_equal(lift(SphereOrPlane::sphere(Vec3::Zero(), 1.0)), {mv(0, 0, 0, -1, 0)}));
    CHECK(projectively_equal(lift(SphereOrPlane::point(Vec3::Zero())), {mv(0, 0, 0, -1, 1)}));
    CHECK(projectively_equal(lift(SphereOrPlane::plane(Vec3(0, 0, 1), 0.0)), {mv(0, 0, 1, 0, 0)}));

    Rng rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 c = gaussian_vec(rng);
        const double r2 = uniform(rng, -1.0, 3.0);
        const ProjectivePoint p = lift(SphereOrPlane::sphere(c, r2));
        const LightConeCoordinates lc = light_cone_coordinates(p.rep);
        const MinkowskiVector v = p.rep / lc.lambda;
        CHECK(minkowski_inner(v, v) == doctest::Approx(r2).scale(1.0 + c.squaredNorm()).epsilon(1e-12));

        const ProjectivePoint q = lift(SphereOrPlane::plane(gaussian_vec(rng).normalized(), uniform(rng, -2, 2)));
        CHECK(std::abs(minkowski_inner(q.rep, e_infinity())) <= 1e-15);
    }
}

TEST_CASE("unlift") {
    check_same_sphere(unlift({mv(0, 0, 0, -1, 0)}), Vec3::Zero(), 1.0, 1e-15);
    const SphereOrPlane plane = unlift({mv(0, 0, 1, 0, 0)});
    REQUIRE(plane.is_plane());
    CHECK((plane.as_plane().normal - Vec3(0, 0, 1)).norm() <= 1e-15);
    CHECK(plane.as_plane().offset == 0.0);
    CHECK_THROWS_AS(unlift({mv(0, 0, 0, 1, 1)}), PointAtInfinity);

    Rng rng(33);
    for (int trial = 0; trial < 200; ++trial) {
        const SphereOrPlane s = trial % 4 ? random_sphere(rng)
                                          : SphereOrPlane::plane(gaussian_vec(rng).normalized(), uniform(rng, -2, 2));
        const ProjectivePoint p{lift(s).rep * uniform(rng, -3.0, 3.0)};
        CHECK(projectively_equal(lift(unlift(p)), p));
    }
}

TEST_CASE("orthogonality examples") {
    const OrthogonalityCheck a =
        orthogonal(SphereOrPlane::sphere(Vec3::Zero(), 1.0), SphereOrPlane::sphere(Vec3(2, 0, 0), 3.0));
    CHECK(a.orthogonal);
    CHECK(a.lifted_residual <= 1e-15);
    REQUIRE(a.euclidean_residual.has_value());
    CHECK(*a.euclidean_residual == 0.0);

    const OrthogonalityCheck b =
        orthogonal(SphereOrPlane::sphere(Vec3::Zero(), 1.0), SphereOrPlane::plane(Vec3(0, 0, 1), 0.0));
    CHECK(b.orthogonal);
    CHECK_FALSE(b.euclidean_residual.has_value());

    const OrthogonalityCheck c =
        orthogonal(SphereOrPlane::sphere(Vec3(1, 0, 0), 2.0), SphereOrPlane::sphere(Vec3::Zero(), -1.0));
    CHECK(c.orthogonal);

    CHECK_FALSE(orthogonal(SphereOrPlane::sphere(Vec3::Zero(), 1.0), SphereOrPlane::sphere(Vec3(2, 0, 0), 2.0))
                    .orthogonal);
}

TEST_CASE("Euclidean and lifted orthogonality residuals agree") {
    Rng rng(34);
    for (int trial = 0; trial < 10000; ++trial) {
        const SphereOrPlane a = random_sphere(rng);
        SphereOrPlane b = random_sphere(rng);
        if (trial % 2) {
            // orthogonal partner
            const Sphere& s = a.as_sphere();
            const Vec3 c = s.center + gaussian_vec(rng, 2.0);
            b = SphereOrPlane::sphere(c, (c - s.center).squaredNorm() - s.r2);
        }
        const OrthogonalityCheck o = orthogonal(a, b);
        REQUIRE(o.euclidean_residual.has_value());
        REQUIRE(o.lifted_euclidean_residual.has_value());
        CHECK(std::abs(*o.euclidean_residual - *o.lifted_euclidean_residual) <= 1e-12);
    }
}

TEST_CASE("congruence of a square grid") {
    SUBCASE("constant radii") {
        const SphereCongruence c = build_congruence(grid(4, 4), 0.5);
        for (const SphereOrPlane& s : c.members()) {
            CHECK(s.as_sphere().r2 == 0.5);
        }
        CHECK(c.max_adjacent_residual() == 0.0);
    }
    SUBCASE("alternating radii") {
        const SphereCongruence c = build_congruence(grid(4, 4), 2.0);
        for (int l = 0; l < 4; ++l) {
            for (int k = 0; k < 4; ++k) {
                CHECK(c(k, l).as_sphere().r2 == ((k + l) % 2 ? -1.0 : 2.0));
            }
        }
    }
    SUBCASE("sheared grid") {
        try {
            build_congruence(grid(4, 4, 0.3), 0.5);
            FAIL("no error");
        } catch (const GeometryError& e) {
            REQUIRE(e.residual().has_value());
            CHECK(*e.residual() > 1e-3);
        }
    }
}

TEST_CASE("build_congruence succeeds exactly on orthogonal nets") {
    Rng rng(35);
    for (int trial = 0; trial < 100; ++trial) {
        QuadNet net = random_orthogonal_net(rng, 4, 5);
        if (trial % 2) {
            net(1 + trial % 3, 2) += gaussian_vec(rng, 0.05);
        }
        const bool ortho = classify(build_checkerboard(net)).orthogonal;
        bool built = true;
        try {
            build_congruence(net, 0.5 * mean_edge_sq(net));
        } catch (const GeometryError&) {
            built = false;
        }
        CHECK(ortho == built);
        CHECK(ortho == (trial % 2 == 0));
    }
}

TEST_CASE("transform examples") {
    const Vec3 x(0.3, -1.0, 2.0);
    const Vec3 t(1.0, 2.0, -0.5);
    check_same_sphere(MoebiusTransform::translation(t).apply(SphereOrPlane::point(x)), x + t, 0.0, 1e-15);
    check_same_sphere(MoebiusTransform::sphere_inversion(Vec3::Zero(), 1.0).apply(SphereOrPlane::point(Vec3(2, 0, 0))),
                      Vec3(0.5, 0, 0), 0.0, 1e-15);
    check_same_sphere(MoebiusTransform::scaling(2.0).apply(SphereOrPlane::sphere(Vec3(1, 0, 0), 1.0)), Vec3(2, 0, 0),
                      4.0, 1e-15);

    CHECK_THROWS_AS(MoebiusTransform::scaling(0.0), std::invalid_argument);
    CHECK_THROWS_AS(MoebiusTransform::sphere_inversion(Vec3::Zero(), -1.0), std::invalid_argument);
}

TEST_CASE("transforms match the classical action") {
    Rng rng(36);
    for (int trial = 0; trial < 500; ++trial) {
        const Vec3 c = gaussian_vec(rng, 3.0);
        const double r2 = uniform(rng, 0.5, 5.0);
        const Vec3 m = gaussian_vec(rng, 3.0);
        const double rho2 = uniform(rng, 0.0, 2.0);
        if (std::abs((m - c).squaredNorm() - rho2) < 0.1) {
            continue;
        }
        const ClassicalSphere want = invert_sphere(m, rho2, c, r2);
        check_same_sphere(MoebiusTransform::sphere_inversion(c, r2).apply(SphereOrPlane::sphere(m, rho2)), want.center,
                          want.r2, 1e-11);

        const Mat3 R = random_rotation(rng);
        const double lambda = uniform(rng, 0.5, 2.0);
        const Vec3 t = gaussian_vec(rng);
        const MoebiusTransform S =
            MoebiusTransform::translation(t) * MoebiusTransform::scaling(lambda) * MoebiusTransform::rotation(R);
        check_same_sphere(S.apply(SphereOrPlane::sphere(m, rho2)), lambda * (R * m) + t, lambda * lambda * rho2, 1e-12);
    }
}

TEST_CASE("generators are Lorentz maps up to scale") {
    Rng rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        CHECK(MoebiusTransform::rotation(random_rotation(rng)).lorentz_residual() <= 1e-10);
        CHECK(MoebiusTransform::translation(gaussian_vec(rng)).lorentz_residual() <= 1e-10);
        CHECK(MoebiusTransform::scaling(uniform(rng, 0.1, 10)).lorentz_residual() <= 1e-10);
        CHECK(MoebiusTransform::sphere_inversion(gaussian_vec(rng), uniform(rng, 0.1, 10)).lorentz_residual() <= 1e-10);
        CHECK(random_moebius(rng).lorentz_residual() <= 1e-10);
    }
    Mat5 bad = Mat5::Identity();
    bad(0, 0) = 2.0;
    CHECK(MoebiusTransform(bad).lorentz_residual() > 0.1);
}

TEST_CASE("apply_moebius") {
    const QuadNet net = grid(4, 4);
    const SphereCongruence c = build_congruence(net, 0.5);

    SUBCASE("identity is bit-identical") {
        const MoebiusImage img = apply_moebius(MoebiusTransform::identity(), c);
        for (std::size_t i = 0; i < net.size(); ++i) {
            CHECK(img.net.vertices()[i] == net.vertices()[i]);
            CHECK(img.congruence.members()[i].as_sphere().r2 == 0.5);
        }
    }
    SUBCASE("inversion centred on a member sphere") {
        const Vec3 center = net(1, 2) + std::sqrt(0.5) * Vec3(1, 0, 0);
        try {
            apply_moebius(MoebiusTransform::sphere_inversion(center, 1.0), c);
            FAIL("no error");
        } catch (const GeometryError& e) {
            REQUIRE(e.where().has_value());
            CHECK(*e.where() == GridIndex{1, 2});
        }
    }
    SUBCASE("orthogonality is preserved") {
        Rng rng(38);
        for (int trial = 0; trial < 50; ++trial) {
            const QuadNet o = random_orthogonal_net(rng, 5, 5);
            const SphereCongruence oc = build_congruence(o, 0.5 * mean_edge_sq(o));
            CHECK(apply_moebius(random_moebius(rng), oc).congruence.max_adjacent_residual() <= 1e-10);
        }
    }
}

TEST_CASE("principal nets stay principal") {
    Rng rng(39);
    for (int trial = 0; trial < 20; ++trial) {
        const QuadNet net = random_revolution_net(rng, 5, 5);
        const SphereCongruence c = build_congruence(net, 0.5 * mean_edge_sq(net));
        for (int j = 0; j < 5; ++j) {
            const QuadNet img = apply_moebius(random_moebius(rng), c).net;
            const Tolerances tol{.orth = 1e-8, .plan = 1e-8};
            const Classification cl = classify(build_checkerboard(img), tol);
            CHECK(cl.principal);
        }
    }
}

TEST_CASE("group law") {
    Rng rng(40);
    for (int trial = 0; trial < 20; ++trial) {
        const QuadNet net = random_orthogonal_net(rng, 4, 4);
        const SphereCongruence c = build_congruence(net, 0.5 * mean_edge_sq(net));
        const MoebiusTransform A = random_moebius(rng);
        const MoebiusTransform B = random_moebius(rng);
        const QuadNet two = apply_moebius(B, apply_moebius(A, c).congruence).net;
        const QuadNet one = apply_moebius(B * A, c).net;
        for (std::size_t i = 0; i < one.size(); ++i) {
            CHECK((one.vertices()[i] - two.vertices()[i]).norm() <= 1e-10 * one.diameter());
        }
    }
}

TEST_CASE("pseudo-principal nets") {
    Rng rng(41);
    SUBCASE("principal congruence") {
        const QuadNet net = random_revolution_net(rng, 5, 5);
        const SphereCongruence c = build_congruence(net, 0.5 * mean_edge_sq(net));
        const PseudoPrincipalCheck p = is_pseudo_principal(c.lifted(), 5, 5);
        CHECK(p.pseudo_principal);
        CHECK(p.orthogonal);
        CHECK(p.conjugate);
    }
    SUBCASE("orthogonal but not conjugate") {
        const QuadNet net = random_orthogonal_net(rng, 5, 5);
        const SphereCongruence c = build_congruence(net, 0.5 * mean_edge_sq(net));
        const PseudoPrincipalCheck p = is_pseudo_principal(c.lifted(), 5, 5);
        CHECK(p.orthogonal);
        CHECK_FALSE(p.conjugate);
        CHECK_FALSE(p.pseudo_principal);
    }
    SUBCASE("random points") {
        std::vector<ProjectivePoint> pts;
        for (int i = 0; i < 25; ++i) {
            pts.push_back({MinkowskiVector::Random()});
        }
        const PseudoPrincipalCheck p = is_pseudo_principal(pts, 5, 5);
        CHECK_FALSE(p.pseudo_principal);
        CHECK_FALSE(p.orthogonal);
    }
}

TEST_CASE("principal Gauss image") {
    SUBCASE("an exact Gauss net reproduces itself") {
        SampleSpec s{.kind = SampleKind::enneper_gauss, .eps = 0.1, .rows = 6, .cols = 6, .k0 = -3, .l0 = -3};
        const QuadNet n = generate(s);
        const PrincipalGaussImage pg = principal_gauss_image(n, {2, 2}, n(2, 2));
        const QuadNet img = pg.gauss.to_net();
        for (std::size_t i = 0; i < n.size(); ++i) {
            CHECK((img.vertices()[i] - n.vertices()[i]).norm() <= 1e-10);
        }
    }
    SUBCASE("revolution net") {
        Rng rng(42);
        for (int trial = 0; trial < 20; ++trial) {
            const QuadNet net = random_revolution_net(rng, 5, 5);
            const PrincipalGaussImage pg = principal_gauss_image(net, {2, 2}, 1.3 * white_face_normal(net, {2, 2}));
            CHECK(pg.parallel_residual <= 1e-8);
            CHECK(pg.polarity_residual <= 1e-8);
            CHECK(pg.sphere_residual <= 1e-8);
        }
    }
    SUBCASE("planar net") {
        CHECK_THROWS_AS(principal_gauss_image(grid(4, 4), {1, 1}, Vec3(0, 0, 1)), GeometryError);
    }
}
