#include "cbnet/moebius.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace cbnet {

double minkowski_inner(const MinkowskiVector& a, const MinkowskiVector& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3] - a[4] * b[4];
}

Mat5 minkowski_metric() {
    Mat5 J = Mat5::Identity();
    J(4, 4) = -1.0;
    return J;
}

MinkowskiVector basis_vector(int i) {
    if (i < 1 || i > 5) {
        throw std::out_of_range("basis index must be in 1..5");
    }
    MinkowskiVector e = MinkowskiVector::Zero();
    e[i - 1] = 1.0;
    return e;
}

MinkowskiVector e_zero() { return 0.5 * (basis_vector(5) - basis_vector(4)); }
MinkowskiVector e_infinity() { return 0.5 * (basis_vector(4) + basis_vector(5)); }

LightConeCoordinates light_cone_coordinates(const MinkowskiVector& v) {
    return {v.head<3>(), v[4] - v[3], v[3] + v[4]};
}

MinkowskiVector from_light_cone_coordinates(const Vec3& x, double lambda, double mu) {
    MinkowskiVector v;
    v.head<3>() = x;
    v[3] = 0.5 * (mu - lambda);
    v[4] = 0.5 * (mu + lambda);
    return v;
}

MinkowskiVector ProjectivePoint::normalized() const {
    const double n = rep.norm();
    if (!(n > 0.0)) {
        throw GeometryError("zero vector is not a projective point");
    }
    return rep / n;
}

bool projectively_equal(const ProjectivePoint& a, const ProjectivePoint& b, double tol) {
    const MinkowskiVector x = a.normalized();
    const MinkowskiVector y = b.normalized();
    return std::min((x - y).norm(), (x + y).norm()) <= tol;
}

SphereOrPlane SphereOrPlane::sphere(const Vec3& center, double r2) {
    if (!center.allFinite() || !std::isfinite(r2)) {
        throw std::invalid_argument("sphere needs a finite center and squared radius");
    }
    return SphereOrPlane(Sphere{center, r2});
}

SphereOrPlane SphereOrPlane::plane(const Vec3& normal, double offset) {
    const double n = normal.norm();
    if (!(n > 0.0) || !std::isfinite(n) || !std::isfinite(offset)) {
        throw std::invalid_argument("plane needs a nonzero finite normal");
    }
    return SphereOrPlane(Plane{normal / n, offset / n});
}

const Sphere& SphereOrPlane::as_sphere() const {
    if (!is_sphere()) {
        throw GeometryError("expected a sphere, found a plane");
    }
    return std::get<Sphere>(v_);
}

const Plane& SphereOrPlane::as_plane() const {
    if (!is_plane()) {
        throw GeometryError("expected a plane, found a sphere");
    }
    return std::get<Plane>(v_);
}

ProjectivePoint lift(const SphereOrPlane& s) {
    if (s.is_sphere()) {
        const Sphere& sp = s.as_sphere();
        return {from_light_cone_coordinates(sp.center, 1.0, sp.center.squaredNorm() - sp.r2)};
    }
    const Plane& pl = s.as_plane();
    return {from_light_cone_coordinates(pl.normal, 0.0, 2.0 * pl.offset)};
}

SphereOrPlane unlift(const ProjectivePoint& p, double rel_tol) {
    const double len = p.rep.norm();
    if (!(len > 0.0)) {
        throw GeometryError("zero vector is not a projective point");
    }
    const LightConeCoordinates c = light_cone_coordinates(p.rep);
    if (std::abs(c.lambda) > rel_tol * len) {
        const Vec3 center = c.x / c.lambda;
        return SphereOrPlane::sphere(center, center.squaredNorm() - c.mu / c.lambda);
    }
    const double nx = c.x.norm();
    if (!(nx > rel_tol * len)) {
        throw PointAtInfinity();
    }
    return SphereOrPlane::plane(c.x / nx, 0.5 * c.mu / nx);
}

OrthogonalityCheck orthogonal(const SphereOrPlane& a, const SphereOrPlane& b, double tol) {
    OrthogonalityCheck out{};
    const ProjectivePoint la = lift(a);
    const ProjectivePoint lb = lift(b);
    out.lifted_residual = std::abs(minkowski_inner(la.normalized(), lb.normalized()));
    if (a.is_sphere() && b.is_sphere()) {
        const Sphere& s1 = a.as_sphere();
        const Sphere& s2 = b.as_sphere();
        const double d2 = (s1.center - s2.center).squaredNorm();
        const double scale = d2 + std::abs(s1.r2) + std::abs(s2.r2);
        const double gap = d2 - s1.r2 - s2.r2;
        const double lifted_gap = -2.0 * minkowski_inner(la.rep, lb.rep);
        out.euclidean_residual = scale > 0.0 ? std::abs(gap) / scale : 0.0;
        out.lifted_euclidean_residual = scale > 0.0 ? std::abs(lifted_gap) / scale : 0.0;
        out.orthogonal = *out.euclidean_residual <= tol;
    } else {
        out.orthogonal = out.lifted_residual <= tol;
    }
    return out;
}

SphereCongruence::SphereCongruence(int rows, int cols, std::vector<SphereOrPlane> members)
    : rows_(rows), cols_(cols), members_(std::move(members)) {
    if (members_.size() != static_cast<std::size_t>(rows) * cols) {
        throw std::invalid_argument("congruence member count does not match rows*cols");
    }
}

QuadNet SphereCongruence::centers() const {
    QuadNet out(rows_, cols_);
    for (int l = 0; l < cols_; ++l) {
        for (int k = 0; k < rows_; ++k) {
            const SphereOrPlane& s = (*this)(k, l);
            if (!s.is_sphere()) {
                throw GeometryError("member at " + to_string({k, l}) + " is a plane; no center",
                                    std::nullopt, GridIndex{k, l});
            }
            out(k, l) = s.as_sphere().center;
        }
    }
    return out;
}

double SphereCongruence::max_adjacent_residual() const {
    double worst = 0.0;
    auto res = [](const OrthogonalityCheck& c) {
        return c.euclidean_residual ? *c.euclidean_residual : c.lifted_residual;
    };
    for (int l = 0; l < cols_; ++l) {
        for (int k = 0; k < rows_; ++k) {
            if (k + 1 < rows_) {
                worst = std::max(worst, res(orthogonal((*this)(k, l), (*this)(k + 1, l))));
            }
            if (l + 1 < cols_) {
                worst = std::max(worst, res(orthogonal((*this)(k, l), (*this)(k, l + 1))));
            }
        }
    }
    return worst;
}

std::vector<ProjectivePoint> SphereCongruence::lifted() const {
    std::vector<ProjectivePoint> out;
    out.reserve(members_.size());
    for (const auto& m : members_) {
        out.push_back(lift(m));
    }
    return out;
}

SphereCongruence build_congruence(const QuadNet& net, double r0sq, double tol) {
    const int R = net.rows();
    const int C = net.cols();
    if (R < 1 || C < 1) {
        throw GeometryError("empty net");
    }
    std::vector<double> r2(net.size());
    auto at = [&](int k, int l) -> double& { return r2[net.index(k, l)]; };
    at(0, 0) = r0sq;
    for (int k = 0; k + 1 < R; ++k) {
        at(k + 1, 0) = (net(k + 1, 0) - net(k, 0)).squaredNorm() - at(k, 0);
    }
    for (int l = 0; l + 1 < C; ++l) {
        for (int k = 0; k < R; ++k) {
            at(k, l + 1) = (net(k, l + 1) - net(k, l)).squaredNorm() - at(k, l);
        }
    }
    double worst = 0.0;
    GridIndex where{};
    for (int l = 1; l < C; ++l) {
        for (int k = 0; k + 1 < R; ++k) {
            const double d2 = (net(k + 1, l) - net(k, l)).squaredNorm();
            const double scale = d2 + std::abs(at(k, l)) + std::abs(at(k + 1, l));
            const double res = scale > 0.0 ? std::abs(d2 - at(k, l) - at(k + 1, l)) / scale : 0.0;
            if (res > worst) {
                worst = res;
                where = {k, l};
            }
        }
    }
    if (!(worst <= tol)) {
        throw GeometryError("sphere congruence does not close: the checkerboard is not orthogonal",
                            worst, where);
    }
    std::vector<SphereOrPlane> members;
    members.reserve(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        members.push_back(SphereOrPlane::sphere(net.vertices()[i], r2[i]));
    }
    return SphereCongruence(R, C, std::move(members));
}

namespace {

// Change of basis from (e1..e5) to light-cone coordinates (x, lambda, mu).
Mat5 to_light_cone() {
    Mat5 Cm = Mat5::Zero();
    Cm.topLeftCorner<3, 3>().setIdentity();
    Cm(3, 3) = -1.0;
    Cm(3, 4) = 1.0;
    Cm(4, 3) = 1.0;
    Cm(4, 4) = 1.0;
    return Cm;
}

MoebiusTransform from_light_cone_matrix(const Mat5& A) {
    const Mat5 Cm = to_light_cone();
    return MoebiusTransform(Cm.inverse() * A * Cm);
}

}  // namespace

MoebiusTransform MoebiusTransform::rotation(const Mat3& R) {
    if ((R.transpose() * R - Mat3::Identity()).norm() > 1e-10) {
        throw std::invalid_argument("rotation matrix is not orthogonal");
    }
    Mat5 T = Mat5::Identity();
    T.topLeftCorner<3, 3>() = R;
    return MoebiusTransform(T);
}

MoebiusTransform MoebiusTransform::translation(const Vec3& t) {
    Mat5 A = Mat5::Identity();
    A.block<3, 1>(0, 3) = t;
    A.block<1, 3>(4, 0) = 2.0 * t.transpose();
    A(4, 3) = t.squaredNorm();
    return from_light_cone_matrix(A);
}

MoebiusTransform MoebiusTransform::scaling(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("scaling factor must be positive");
    }
    Mat5 A = Mat5::Identity();
    A(3, 3) = 1.0 / lambda;
    A(4, 4) = lambda;
    return from_light_cone_matrix(A);
}

MoebiusTransform MoebiusTransform::sphere_inversion(const Vec3& center, double r2) {
    if (!(r2 > 0.0) || !std::isfinite(r2)) {
        throw std::invalid_argument("inversion needs a positive squared radius");
    }
    const MinkowskiVector v = lift(SphereOrPlane::sphere(center, r2)).rep;  // <<v,v>> = r2
    const Mat5 J = minkowski_metric();
    return MoebiusTransform(Mat5::Identity() - (2.0 / r2) * v * (J * v).transpose());
}

double MoebiusTransform::lorentz_residual() const {
    const Mat5 J = minkowski_metric();
    const Mat5 M = T_.transpose() * J * T_;
    const double s = (M.cwiseProduct(J)).sum() / 5.0;
    if (!(s > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return (M - s * J).norm() / (s * J.norm());
}

MoebiusImage apply_moebius(const MoebiusTransform& T, const SphereCongruence& cong) {
    if (T.is_identity()) {
        return {cong, cong.centers()};
    }
    std::vector<SphereOrPlane> out;
    out.reserve(cong.members().size());
    for (int l = 0; l < cong.cols(); ++l) {
        for (int k = 0; k < cong.rows(); ++k) {
            const GridIndex g{k, l};
            SphereOrPlane s = SphereOrPlane::point(Vec3::Zero());
            try {
                s = T.apply(cong(k, l));
            } catch (const PointAtInfinity&) {
                throw GeometryError("member at " + to_string(g) + " maps to the point at infinity",
                                    std::nullopt, g);
            }
            if (!s.is_sphere()) {
                throw GeometryError("member at " + to_string(g) + " maps to a plane", std::nullopt, g);
            }
            out.push_back(s);
        }
    }
    SphereCongruence image(cong.rows(), cong.cols(), std::move(out));
    QuadNet net = image.centers();
    return {std::move(image), std::move(net)};
}

PseudoPrincipalCheck is_pseudo_principal(const std::vector<ProjectivePoint>& lifted, int rows, int cols,
                                         double tol) {
    if (rows < 3 || cols < 3 || lifted.size() != static_cast<std::size_t>(rows) * cols) {
        throw std::invalid_argument("pseudo-principal test needs a grid of at least 3x3 points");
    }
    auto at = [&](int k, int l) -> const ProjectivePoint& {
        return lifted[static_cast<std::size_t>(l) * rows + k];
    };
    PseudoPrincipalCheck out{};
    for (int l = 0; l < cols; ++l) {
        for (int k = 0; k < rows; ++k) {
            const MinkowskiVector g = at(k, l).normalized();
            if (k + 1 < rows) {
                out.orthogonality_residual = std::max(
                    out.orthogonality_residual, std::abs(minkowski_inner(g, at(k + 1, l).normalized())));
            }
            if (l + 1 < cols) {
                out.orthogonality_residual = std::max(
                    out.orthogonality_residual, std::abs(minkowski_inner(g, at(k, l + 1).normalized())));
            }
        }
    }
    // Affine chart lambda = 1 with coordinates (x, mu).
    auto chart = [&](int k, int l, Eigen::Vector4d& y) {
        const MinkowskiVector v = at(k, l).rep;
        const LightConeCoordinates c = light_cone_coordinates(v);
        if (!(std::abs(c.lambda) > 1e-13 * v.norm())) {
            return false;
        }
        y << c.x / c.lambda, c.mu / c.lambda;
        return true;
    };
    const int dk[4] = {1, 0, -1, 0};
    const int dl[4] = {0, 1, 0, -1};
    for (int l = 1; l + 1 < cols; ++l) {
        for (int k = 1; k + 1 < rows; ++k) {
            Eigen::Vector4d g;
            Eigen::Matrix4d pts;
            bool ok = chart(k, l, g);
            for (int i = 0; i < 4 && ok; ++i) {
                Eigen::Vector4d gi;
                ok = chart(k + dk[i], l + dl[i], gi);
                pts.col(i) = 0.5 * (g + gi);
            }
            if (!ok) {
                out.conjugacy_residual = std::numeric_limits<double>::infinity();
                continue;
            }
            double diam = 0.0;
            for (int i = 0; i < 4; ++i) {
                for (int j = i + 1; j < 4; ++j) {
                    diam = std::max(diam, (pts.col(i) - pts.col(j)).norm());
                }
            }
            if (!(diam > 0.0)) {
                continue;
            }
            const Eigen::Vector4d centroid = pts.rowwise().mean();
            const Eigen::Matrix4d A = pts.colwise() - centroid;
            Eigen::JacobiSVD<Eigen::Matrix4d> svd(A, Eigen::ComputeFullU);
            const Eigen::Matrix<double, 4, 2> off = svd.matrixU().rightCols<2>();
            double worst = 0.0;
            for (int i = 0; i < 4; ++i) {
                worst = std::max(worst, (off.transpose() * A.col(i)).norm());
            }
            out.conjugacy_residual = std::max(out.conjugacy_residual, worst / diam);
        }
    }
    out.orthogonal = out.orthogonality_residual <= tol;
    out.conjugate = out.conjugacy_residual <= tol;
    out.pseudo_principal = out.orthogonal && out.conjugate;
    return out;
}

Vec3 white_face_normal(const QuadNet& net, GridIndex v) {
    const Vec3 vn = vertex_normal(net, v.k, v.l);
    const std::array<Vec3, 4> q{net(v.k + 1, v.l), net(v.k, v.l + 1), net(v.k - 1, v.l), net(v.k, v.l - 1)};
    const Vec3 centroid = 0.25 * (q[0] + q[1] + q[2] + q[3]);
    Eigen::Matrix<double, 4, 3> A;
    for (int i = 0; i < 4; ++i) {
        A.row(i) = (q[i] - centroid).transpose();
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>> svd(A, Eigen::ComputeFullV);
    Vec3 n = svd.matrixV().col(2);
    return n.dot(vn) < 0.0 ? Vec3(-n) : n;
}

namespace {

struct Step {
    int dk;
    int dl;
};
constexpr Step kSteps[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

// Neighbour of parent p in direction s from the polarity equations, if both
// diagonals towards that side exist.
std::optional<Vec3> polar_neighbour(const QuadNet& net, const Vec3& np, GridIndex p, Step s) {
    const int pk = -s.dl;  // perpendicular step
    const int pl = s.dk;
    const GridIndex a{p.k + s.dk + pk, p.l + s.dl + pl};
    const GridIndex b{p.k + s.dk - pk, p.l + s.dl - pl};
    if (!net.contains(a.k, a.l) || !net.contains(b.k, b.l)) {
        return std::nullopt;
    }
    const Vec3 d1 = net(a.k, a.l) - net(p.k, p.l);
    const Vec3 d2 = net(b.k, b.l) - net(p.k, p.l);
    Mat3 M;
    M.row(0) = np.transpose();
    M.row(1) = d1.transpose() / d1.norm();
    M.row(2) = d2.transpose() / d2.norm();
    const double det = M.determinant();
    if (!(std::abs(det) > 1e-12 * np.norm())) {
        throw GeometryError("degenerate polar construction at " + to_string(p), std::nullopt, p);
    }
    return M.partialPivLu().solve(Vec3(1.0, 0.0, 0.0));
}

}  // namespace

PrincipalGaussImage principal_gauss_image(const QuadNet& net, GridIndex start, const Vec3& seed, double tol) {
    const int R = net.rows();
    const int C = net.cols();
    if (R < 3 || C < 3) {
        throw GeometryError("principal Gauss image needs a net of at least 3x3 vertices");
    }
    if (start.k < 1 || start.l < 1 || start.k + 1 >= R || start.l + 1 >= C) {
        throw GeometryError("principal Gauss image must start at an interior vertex", std::nullopt, start);
    }
    const Vec3 wn = white_face_normal(net, start);
    if (!(seed.norm() > 0.0) || seed.cross(wn).norm() > tol * seed.norm()) {
        throw GeometryError("seed is not on the line orthogonal to the white face at the start vertex",
                            seed.cross(wn).norm() / std::max(seed.norm(), 1e-300), start);
    }

    GaussNet g(R, C);
    g.set(start.k, start.l, seed);
    std::deque<GridIndex> queue{start};
    while (!queue.empty()) {
        const GridIndex p = queue.front();
        queue.pop_front();
        for (const Step& s : kSteps) {
            const GridIndex c{p.k + s.dk, p.l + s.dl};
            if (!net.contains(c.k, c.l) || g.has(c.k, c.l)) {
                continue;
            }
            if (auto n = polar_neighbour(net, g(p.k, p.l), p, s)) {
                g.set(c.k, c.l, *n);
                queue.push_back(c);
            }
        }
    }

    // Every other parent must agree with the value found first.
    double scale = 0.0;
    for (int l = 0; l < C; ++l) {
        for (int k = 0; k < R; ++k) {
            if (g.has(k, l)) {
                scale = std::max(scale, g(k, l).norm());
            }
        }
    }
    for (int l = 0; l < C; ++l) {
        for (int k = 0; k < R; ++k) {
            if (!g.has(k, l)) {
                continue;
            }
            for (const Step& s : kSteps) {
                const GridIndex c{k + s.dk, l + s.dl};
                if (!g.has(c.k, c.l)) {
                    continue;
                }
                if (auto n = polar_neighbour(net, g(k, l), {k, l}, s)) {
                    const double gap = (*n - g(c.k, c.l)).norm() / scale;
                    if (gap > tol) {
                        throw GeometryError("principal Gauss image is inconsistent: the net is not principal",
                                            gap, c);
                    }
                }
            }
        }
    }

    // Image edge scale along a diagonal of face (k,l): du (f -> f12) or dv (f1 -> f2).
    auto edge_scale = [&](int k, int l, bool du) -> std::optional<double> {
        if (k < 0 || l < 0 || k + 1 >= R || l + 1 >= C) {
            return std::nullopt;
        }
        const GridIndex a = du ? GridIndex{k, l} : GridIndex{k + 1, l};
        const GridIndex b = du ? GridIndex{k + 1, l + 1} : GridIndex{k, l + 1};
        if (!g.has(a.k, a.l) || !g.has(b.k, b.l)) {
            return std::nullopt;
        }
        const Vec3 ef = net(b.k, b.l) - net(a.k, a.l);
        return (g(b.k, b.l) - g(a.k, a.l)).dot(ef) / ef.squaredNorm();
    };
    const GridIndex corners[4] = {{0, 0}, {R - 1, 0}, {0, C - 1}, {R - 1, C - 1}};
    for (const GridIndex& c : corners) {
        const int fk = c.k == 0 ? 0 : R - 2;
        const int fl = c.l == 0 ? 0 : C - 2;
        const bool du = (c.k == 0) == (c.l == 0);  // corner lies on the f -> f12 diagonal
        const GridIndex d{c.k == 0 ? 1 : R - 2, c.l == 0 ? 1 : C - 2};
        double sum = 0.0;
        int count = 0;
        for (const auto& nb : {std::pair{fk + (c.k == 0 ? 1 : -1), fl}, std::pair{fk, fl + (c.l == 0 ? 1 : -1)}}) {
            if (auto s = edge_scale(nb.first, nb.second, du)) {
                sum += *s;
                ++count;
            }
        }
        if (count == 0) {
            throw GeometryError("cannot fix the corner of the principal Gauss image", std::nullopt, c);
        }
        g.set(c.k, c.l, g(d.k, d.l) + (sum / count) * (net(c.k, c.l) - net(d.k, d.l)));
    }

    PrincipalGaussImage out;
    out.gauss = g;
    std::vector<SphereOrPlane> spheres;
    spheres.reserve(net.size());
    const SphereOrPlane unit = SphereOrPlane::sphere(Vec3::Zero(), 1.0);
    for (int l = 0; l < C; ++l) {
        for (int k = 0; k < R; ++k) {
            const Vec3& n = g(k, l);
            spheres.push_back(SphereOrPlane::sphere(n, n.squaredNorm() - 1.0));
            out.sphere_residual = std::max(out.sphere_residual, *orthogonal(spheres.back(), unit).euclidean_residual);
            if (k + 1 < R) {
                out.polarity_residual = std::max(out.polarity_residual, std::abs(n.dot(g(k + 1, l)) - 1.0));
            }
            if (l + 1 < C) {
                out.polarity_residual = std::max(out.polarity_residual, std::abs(n.dot(g(k, l + 1)) - 1.0));
            }
        }
    }
    out.spheres = SphereCongruence(R, C, std::move(spheres));
    out.sphere_residual = std::max(out.sphere_residual, out.spheres.max_adjacent_residual());

    const double tiny = 1e-12 * std::max(scale, 1.0);
    for (int l = 0; l + 1 < C; ++l) {
        for (int k = 0; k + 1 < R; ++k) {
            const Vec3 duf = net(k + 1, l + 1) - net(k, l);
            const Vec3 dvf = net(k, l + 1) - net(k + 1, l);
            const Vec3 dun = g(k + 1, l + 1) - g(k, l);
            const Vec3 dvn = g(k, l + 1) - g(k + 1, l);
            if (dun.norm() <= tiny || dvn.norm() <= tiny) {
                throw GeometryError("degenerate polar construction: image edges vanish", std::nullopt,
                                    GridIndex{k, l});
            }
            out.parallel_residual = std::max(out.parallel_residual, duf.cross(dun).norm() / (duf.norm() * dun.norm()));
            out.parallel_residual = std::max(out.parallel_residual, dvf.cross(dvn).norm() / (dvf.norm() * dvn.norm()));
        }
    }
    return out;
}

}  // namespace cbnet
