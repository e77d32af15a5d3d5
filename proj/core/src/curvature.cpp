#include "cbnet/curvature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace cbnet {

namespace {

const double kSqrt2 = std::sqrt(2.0);

Vec3 du_of(const std::array<Vec3, 4>& q) { return (q[2] - q[0]) / kSqrt2; }
Vec3 dv_of(const std::array<Vec3, 4>& q) { return (q[3] - q[1]) / kSqrt2; }

double det3(const Vec3& a, const Vec3& b, const Vec3& c) { return a.dot(b.cross(c)); }

Vec2 normalize_direction(Vec2 d, const Mat2& I) {
    const double n2 = d.dot(I * d);
    if (n2 > 0.0) {
        d /= std::sqrt(n2);
    }
    const double tiny = 1e-14 * d.cwiseAbs().maxCoeff();
    for (int i = 0; i < 2; ++i) {
        if (std::abs(d[i]) > tiny) {
            if (d[i] < 0.0) {
                d = -d;
            }
            break;
        }
    }
    return d;
}

Mat2 sigma_from(const FundamentalForms& ff, GridIndex face) {
    const double detI = ff.I.determinant();
    if (!(std::abs(detI) > 1e-300) || !(detI > 1e-24 * ff.I.squaredNorm())) {
        throw GeometryError("singular first fundamental form", std::nullopt, face);
    }
    return ff.I.inverse() * ff.II;
}

}  // namespace

GaussNet::GaussNet(int rows, int cols)
    : rows_(rows), cols_(cols),
      normals_(static_cast<std::size_t>(rows) * cols, Vec3::Zero()),
      valid_(static_cast<std::size_t>(rows) * cols, 0) {}

bool GaussNet::has(int k, int l) const {
    return k >= 0 && l >= 0 && k < rows_ && l < cols_ && valid_[static_cast<std::size_t>(l) * rows_ + k];
}

const Vec3& GaussNet::operator()(int k, int l) const {
    if (!has(k, l)) {
        throw GeometryError("no normal at vertex " + to_string({k, l}), std::nullopt, GridIndex{k, l});
    }
    return normals_[static_cast<std::size_t>(l) * rows_ + k];
}

void GaussNet::set(int k, int l, const Vec3& n) {
    const std::size_t i = static_cast<std::size_t>(l) * rows_ + k;
    normals_.at(i) = n;
    valid_.at(i) = 1;
}

QuadNet GaussNet::to_net() const {
    QuadNet out(rows_, cols_);
    for (int l = 0; l < cols_; ++l) {
        for (int k = 0; k < rows_; ++k) {
            out(k, l) = (*this)(k, l);
        }
    }
    return out;
}

GaussNet GaussNet::from_net(const QuadNet& net) {
    GaussNet g(net.rows(), net.cols());
    for (int l = 0; l < net.cols(); ++l) {
        for (int k = 0; k < net.rows(); ++k) {
            g.set(k, l, net(k, l));
        }
    }
    return g;
}

Vec3 vertex_normal(const QuadNet& net, int k, int l) {
    if (k < 1 || l < 1 || k + 1 >= net.rows() || l + 1 >= net.cols()) {
        throw GeometryError("vertex normal needs an interior vertex", std::nullopt, GridIndex{k, l});
    }
    const Vec3 c = (net(k + 1, l) - net(k - 1, l)).cross(net(k, l + 1) - net(k, l - 1));
    const double n = c.norm();
    const double scale = (net(k + 1, l) - net(k - 1, l)).norm() * (net(k, l + 1) - net(k, l - 1)).norm();
    if (!(n > 1e-14 * scale) || !(n > 0.0)) {
        throw GeometryError("collinear one-ring at vertex " + to_string({k, l}), std::nullopt,
                            GridIndex{k, l});
    }
    return c / n;
}

GaussNet vertex_normals(const QuadNet& net) {
    GaussNet g(net.rows(), net.cols());
    for (int l = 1; l + 1 < net.cols(); ++l) {
        for (int k = 1; k + 1 < net.rows(); ++k) {
            g.set(k, l, vertex_normal(net, k, l));
        }
    }
    return g;
}

FaceNormalArea face_normal_and_area(const std::array<Vec3, 4>& quad) {
    const Vec3 a = quad[2] - quad[0];
    const Vec3 b = quad[3] - quad[1];
    const Vec3 c = a.cross(b);
    const double n = c.norm();
    if (!(n > 1e-14 * a.norm() * b.norm()) || !(n > 0.0)) {
        throw GeometryError("degenerate quad: diagonals are parallel or vanish");
    }
    const Vec3 N = c / n;
    return {N, det3(du_of(quad), dv_of(quad), N)};
}

std::array<Vec3, 4> control_face(const QuadNet& net, GridIndex f) {
    if (!net.contains(f.k, f.l) || !net.contains(f.k + 1, f.l + 1)) {
        throw std::out_of_range("no control face at " + to_string(f));
    }
    return {net(f.k, f.l), net(f.k + 1, f.l), net(f.k + 1, f.l + 1), net(f.k, f.l + 1)};
}

std::array<Vec3, 4> gauss_face(const GaussNet& g, GridIndex f) {
    return {g(f.k, f.l), g(f.k + 1, f.l), g(f.k + 1, f.l + 1), g(f.k, f.l + 1)};
}

bool has_curvature(const GaussNet& g, GridIndex f) {
    return g.has(f.k, f.l) && g.has(f.k + 1, f.l) && g.has(f.k + 1, f.l + 1) && g.has(f.k, f.l + 1);
}

FundamentalForms fundamental_forms(const QuadNet& net, const GaussNet& gauss, GridIndex face) {
    const auto qf = control_face(net, face);
    const auto qn = gauss_face(gauss, face);
    const std::array<Vec3, 2> df{du_of(qf), dv_of(qf)};
    const std::array<Vec3, 2> dn{du_of(qn), dv_of(qn)};
    FundamentalForms ff;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            ff.I(i, j) = df[i].dot(df[j]);
            ff.II(i, j) = df[i].dot(dn[j]);
        }
    }
    return ff;
}

ShapeResult shape_operator(const QuadNet& net, const GaussNet& gauss, GridIndex face, double sym_tol) {
    ShapeResult r;
    r.forms = fundamental_forms(net, gauss, face);
    r.face_normal = face_normal_and_area(control_face(net, face)).normal;
    r.sigma = sigma_from(r.forms, face);

    const Mat2& I = r.forms.I;
    const Mat2& II = r.forms.II;
    const double amax = II.cwiseAbs().maxCoeff();
    Vec2 ev;
    Mat2 vecs;
    if (amax == 0.0 || std::abs(II(0, 1) - II(1, 0)) <= sym_tol * amax) {
        const Mat2 sym = 0.5 * (II + II.transpose());
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat2> es(sym, I);
        if (es.info() != Eigen::Success) {
            throw GeometryError("generalized eigenproblem failed", std::nullopt, face);
        }
        ev = es.eigenvalues();
        vecs = es.eigenvectors();
    } else {
        Eigen::EigenSolver<Mat2> es(r.sigma);
        const auto cev = es.eigenvalues();
        const double im = std::max(std::abs(cev[0].imag()), std::abs(cev[1].imag()));
        if (im > 1e-12 * std::max(1.0, cev.cwiseAbs().maxCoeff())) {
            throw GeometryError("shape operator has complex eigenvalues", std::nullopt, face);
        }
        ev = cev.real();
        vecs = es.eigenvectors().real();
    }
    const int hi = ev[0] >= ev[1] ? 0 : 1;
    r.kappa1 = ev[hi];
    r.kappa2 = ev[1 - hi];
    r.dir1 = normalize_direction(vecs.col(hi), I);
    r.dir2 = normalize_direction(vecs.col(1 - hi), I);
    return r;
}

std::vector<std::optional<ShapeResult>> curvature_table(const QuadNet& net, const GaussNet& gauss) {
    std::vector<std::optional<ShapeResult>> out;
    if (net.rows() < 2 || net.cols() < 2) {
        return out;
    }
    out.reserve(static_cast<std::size_t>(net.rows() - 1) * (net.cols() - 1));
    for (int l = 0; l + 1 < net.cols(); ++l) {
        for (int k = 0; k + 1 < net.rows(); ++k) {
            if (has_curvature(gauss, {k, l})) {
                out.emplace_back(shape_operator(net, gauss, {k, l}));
            } else {
                out.emplace_back(std::nullopt);
            }
        }
    }
    return out;
}

namespace {

double mixed_area_along(const std::array<Vec3, 4>& qa, const std::array<Vec3, 4>& qb, const Vec3& N) {
    return 0.5 * (det3(du_of(qa), dv_of(qb), N) + det3(du_of(qb), dv_of(qa), N));
}

}  // namespace

double mixed_area(const std::array<Vec3, 4>& qa, const std::array<Vec3, 4>& qb, double tol) {
    const Vec3 N = face_normal_and_area(qa).normal;
    const Vec3 dua = du_of(qa), dva = dv_of(qa), dub = du_of(qb), dvb = dv_of(qb);
    for (const Vec3* e : {&dub, &dvb}) {
        if (std::abs(N.dot(*e)) > tol * e->norm()) {
            throw GeometryError("mixed area needs parallel quads: normals disagree",
                                std::abs(N.dot(*e)) / e->norm());
        }
    }
    return 0.5 * (det3(dua, dvb, N) + det3(dub, dva, N));
}

MixedAreaCurvatures curvatures_via_mixed_area(const QuadNet& net, const GaussNet& gauss, GridIndex face) {
    const auto qf = control_face(net, face);
    const auto qn = gauss_face(gauss, face);
    const Vec3 N = face_normal_and_area(qf).normal;
    std::array<Vec3, 4> proj;
    for (int i = 0; i < 4; ++i) {
        proj[i] = qn[i] - qn[i].dot(N) * N;
    }
    const double A = mixed_area(qf, qf);
    if (!(std::abs(A) > 0.0)) {
        throw GeometryError("zero face area", std::nullopt, face);
    }
    MixedAreaCurvatures out;
    out.area = A;
    out.H = mixed_area_along(qf, proj, N) / A;
    out.K = mixed_area_along(proj, proj, N) / A;
    out.det_I = fundamental_forms(net, gauss, face).I.determinant();
    return out;
}

double offset_area(const QuadNet& net, const GaussNet& gauss, GridIndex face, double t) {
    const auto qf = control_face(net, face);
    const auto qn = gauss_face(gauss, face);
    const Vec3 N = face_normal_and_area(qf).normal;
    std::array<Vec3, 4> q;
    for (int i = 0; i < 4; ++i) {
        if (!(std::abs(qn[i].dot(N)) > 1e-12 * qn[i].norm())) {
            throw GeometryError("vertex normal line parallel to the face plane", std::nullopt, face);
        }
        q[i] = qf[i] + t * qn[i];
    }
    return det3(du_of(q), dv_of(q), N);
}

double steiner_residual(const QuadNet& net, const GaussNet& gauss, GridIndex face, double t) {
    const auto qf = control_face(net, face);
    const double A = face_normal_and_area(qf).area;
    const Mat2 S = sigma_from(fundamental_forms(net, gauss, face), face);
    const double poly = (1.0 + t * S.trace() + t * t * S.determinant()) * A;
    return std::abs(offset_area(net, gauss, face, t) - poly) / std::abs(A);
}

}  // namespace cbnet
