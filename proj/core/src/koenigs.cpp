#include "cbnet/koenigs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbnet {

namespace {

// Checkerboard vertex at the midpoint of the control edge (v, x); v and x
// are grid neighbours.
const Vec3& mid_of(const Checkerboard& cbp, GridIndex v, GridIndex x) {
    if (v.l == x.l) {
        return cbp.kmid(std::min(v.k, x.k), v.l);
    }
    return cbp.lmid(v.k, std::min(v.l, x.l));
}

GridIndex shift(GridIndex g, int dk, int dl) { return {g.k + dk, g.l + dl}; }

// For edge `side` of black face (k,l): the white vertex v, the control
// neighbours a, b of v with m_side = mid(v,a), m_side+1 = mid(v,b), and the
// two remaining neighbours p, q of v.
struct EdgeStencil {
    GridIndex v, a, b, p, q;
};

EdgeStencil stencil(const CbpEdge& e) {
    const GridIndex f = e.face;
    const GridIndex f1 = shift(f, 1, 0);
    const GridIndex f12 = shift(f, 1, 1);
    const GridIndex f2 = shift(f, 0, 1);
    switch (e.side) {
    case 0: return {f1, f, f12, shift(f1, 1, 0), shift(f1, 0, -1)};
    case 1: return {f12, f1, f2, shift(f12, 1, 0), shift(f12, 0, 1)};
    case 2: return {f2, f12, f, shift(f2, 0, 1), shift(f2, -1, 0)};
    case 3: return {f, f2, f1, shift(f, -1, 0), shift(f, 0, -1)};
    default: throw std::invalid_argument("edge side must be 0..3");
    }
}

double one_form_from(const Vec3& a, const Vec3& b, const Vec3& p, const Vec3& q, GridIndex where) {
    const Vec2 t = line_parameter(a, b, p, q);
    if ((b - a).norm() == 0.0) {
        throw GeometryError("zero-length checkerboard edge", std::nullopt, where);
    }
    if (t[0] == 0.0) {
        throw GeometryError("focal point coincides with an edge end", std::nullopt, where);
    }
    return (t[0] - t[1]) / t[0];
}

// Projective distance between two unit-scaled homogeneous points.
double projective_gap(const Vec3& a, const Vec3& b) { return std::min((a - b).norm(), (a + b).norm()); }

}  // namespace

Vec2 line_parameter(const Vec3& a, const Vec3& b, const Vec3& p, const Vec3& q) {
    const Vec3 centroid = 0.25 * (a + b + p + q);
    Mat3 cov = Mat3::Zero();
    for (const Vec3* x : {&a, &b, &p, &q}) {
        const Vec3 d = *x - centroid;
        cov += d * d.transpose();
    }
    const Vec3 m = Eigen::SelfAdjointEigenSolver<Mat3>(cov).eigenvectors().col(0);
    const Vec3 d2 = q - p;
    return {(p - a).cross(d2).dot(m), (b - a).cross(d2).dot(m)};
}

bool has_koenigs_patch(const Checkerboard& cbp, GridIndex face) {
    return face.k >= 1 && face.l >= 1 && face.k + 3 <= cbp.rows() && face.l + 3 <= cbp.cols();
}

BlackPatch black_patch(const Checkerboard& cbp, GridIndex face) {
    if (!has_koenigs_patch(cbp, face)) {
        throw GeometryError("black face " + to_string(face) + " lacks its four white neighbours",
                            std::nullopt, face);
    }
    const int k = face.k;
    const int l = face.l;
    BlackPatch bp;
    bp.face = cbp.black_face(k, l);
    bp.opposite[0] = {cbp.kmid(k + 1, l), cbp.lmid(k + 1, l - 1)};
    bp.opposite[1] = {cbp.lmid(k, l + 1), cbp.kmid(k - 1, l + 1)};
    bp.opposite[2] = {cbp.kmid(k - 1, l), cbp.lmid(k, l - 1)};
    bp.opposite[3] = {cbp.kmid(k + 1, l + 1), cbp.lmid(k + 1, l + 1)};
    return bp;
}

SixPoints six_points(const BlackPatch& bp) {
    const Vec3& c = bp.face[0];
    const Vec3& c1 = bp.face[1];
    const Vec3& c12 = bp.face[2];
    const Vec3& c2 = bp.face[3];
    SixPoints sp;
    sp.p[0] = {1.0, 0.0, 0.0};
    sp.p[1] = {0.0, 1.0, 0.0};
    const Vec2 t3 = line_parameter(c, c1, bp.opposite[0].a, bp.opposite[0].b);
    const Vec2 t4 = line_parameter(c2, c12, bp.opposite[1].a, bp.opposite[1].b);
    const Vec2 t5 = line_parameter(c, c2, bp.opposite[2].a, bp.opposite[2].b);
    const Vec2 t6 = line_parameter(c1, c12, bp.opposite[3].a, bp.opposite[3].b);
    sp.p[2] = {t3[0], 0.0, t3[1]};
    sp.p[3] = {t4[0], t4[1], t4[1]};
    sp.p[4] = {0.0, t5[0], t5[1]};
    sp.p[5] = {t6[1], t6[0], t6[1]};

    const std::array<std::array<Vec3, 2>, 4> lines{{{c, c1}, {c2, c12}, {c, c2}, {c1, c12}}};
    for (int i = 0; i < 4; ++i) {
        const auto r = planarity_residual({lines[i][0], lines[i][1], bp.opposite[i].a, bp.opposite[i].b});
        sp.coplanarity_residual = std::max(sp.coplanarity_residual, r.value_or(0.0));
    }
    for (int i = 0; i < 6; ++i) {
        const double n = sp.p[i].norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
            sp.degenerate = true;
            continue;
        }
        sp.p[i] /= n;
        sp.at_infinity[i] = std::abs(sp.p[i][2]) <= 1e-12;
    }
    for (int i = 0; i < 6 && !sp.degenerate; ++i) {
        for (int j = i + 1; j < 6; ++j) {
            if (projective_gap(sp.p[i], sp.p[j]) <= 1e-9) {
                sp.degenerate = true;
                break;
            }
        }
    }
    return sp;
}

SixPoints six_points(const Checkerboard& cbp, GridIndex face) { return six_points(black_patch(cbp, face)); }

Eigen::Matrix<double, 6, 6> conic_matrix(const std::array<PlanePointH, 6>& p) {
    Eigen::Matrix<double, 6, 6> A;
    for (int i = 0; i < 6; ++i) {
        const double x = p[i][0], y = p[i][1], z = p[i][2];
        A.row(i) << x * x, x * y, y * y, x * z, y * z, z * z;
        const double m = A.row(i).cwiseAbs().maxCoeff();
        if (m > 0.0) {
            A.row(i) /= m;
        }
    }
    return A;
}

double conic_residual(const std::array<PlanePointH, 6>& p) { return std::abs(conic_matrix(p).determinant()); }

GridIndex edge_white_vertex(const CbpEdge& e) { return stencil(e).v; }

double one_form(const Checkerboard& cbp, const CbpEdge& e) {
    if (!cbp.has_black_face(e.face.k, e.face.l)) {
        throw std::out_of_range("no black face at " + to_string(e.face));
    }
    const EdgeStencil s = stencil(e);
    if (!cbp.has_white_face(s.v.k, s.v.l)) {
        throw GeometryError("edge has no white face on the other side", std::nullopt, e.face);
    }
    return one_form_from(mid_of(cbp, s.v, s.a), mid_of(cbp, s.v, s.b), mid_of(cbp, s.v, s.p),
                         mid_of(cbp, s.v, s.q), e.face);
}

double one_form_control(const QuadNet& net, const CbpEdge& e) {
    const EdgeStencil s = stencil(e);
    for (const GridIndex& g : {s.a, s.b, s.p, s.q}) {
        if (!net.contains(g.k, g.l)) {
            throw GeometryError("edge has no white face on the other side", std::nullopt, e.face);
        }
    }
    return one_form_from(net(s.a.k, s.a.l), net(s.b.k, s.b.l), net(s.p.k, s.p.l), net(s.q.k, s.q.l), e.face);
}

double one_form_closure_black(const Checkerboard& cbp, GridIndex face) {
    double prod = 1.0;
    for (int s = 0; s < 4; ++s) {
        prod *= one_form(cbp, {face, s});
    }
    return prod;
}

double one_form_closure_white(const Checkerboard& cbp, GridIndex v) {
    if (!cbp.has_white_face(v.k, v.l)) {
        throw std::out_of_range("no white face at " + to_string(v));
    }
    return one_form(cbp, {v, 3}) * one_form(cbp, {shift(v, -1, 0), 0}) *
           one_form(cbp, {shift(v, -1, -1), 1}) * one_form(cbp, {shift(v, 0, -1), 2});
}

LaplaceInvariants laplace_invariants(const QuadNet& net, GridIndex face, double tol_plan) {
    const int k = face.k;
    const int l = face.l;
    if (k < 1 || l < 1 || k + 3 > net.rows() || l + 3 > net.cols()) {
        throw GeometryError("Laplace invariants need the two-ring of face " + to_string(face), std::nullopt,
                            face);
    }
    auto F = [&](int a, int b) -> const Vec3& { return net(k + a, l + b); };
    auto cr = [&](const Vec3& a, const Vec3& b, const Vec3& p1, const Vec3& p2, const Vec3& q1,
                  const Vec3& q2) {
        for (const std::array<Vec3, 4>& quad : {std::array<Vec3, 4>{a, b, p2, p1}, std::array<Vec3, 4>{a, b, q2, q1}}) {
            const auto r = planarity_residual(quad);
            if (r && *r > tol_plan) {
                throw GeometryError("skew line pair in the Laplace invariant of face " + to_string(face), *r,
                                    face);
            }
        }
        const Vec2 P = line_parameter(a, b, p1, p2);
        const Vec2 Q = line_parameter(a, b, q1, q2);
        return P[0] * (Q[1] - Q[0]) / ((P[1] - P[0]) * Q[0]);
    };
    return {cr(F(1, 0), F(0, 1), F(-1, 0), F(0, -1), F(2, 1), F(1, 2)),
            cr(F(0, 0), F(1, 1), F(2, 0), F(1, -1), F(-1, 1), F(0, 2))};
}

double koenigs_conic_residual(const SixPoints& sp) {
    const double X3 = sp.p[2][0], W3 = sp.p[2][2];
    const double X4 = sp.p[3][0], W4 = sp.p[3][1];
    const double X5 = sp.p[4][1], W5 = sp.p[4][2];
    const double W6 = sp.p[5][0], X6 = sp.p[5][1];
    const double terms[6] = {W3 * W6 * X4 * X5, -W3 * X4 * X5 * X6, -W4 * W5 * X3 * X6,
                             W4 * X3 * X5 * X6, W5 * X3 * X4 * X6, -W6 * X3 * X4 * X5};
    double sum = 0.0;
    double mag = 0.0;
    for (double t : terms) {
        sum += t;
        mag += std::abs(t);
    }
    return mag > 0.0 ? std::abs(sum) / mag : 0.0;
}

KoenigsVerdict is_koenigs(const Checkerboard& cbp, const Tolerances& tol) {
    tol.validate();
    const Classification cl = classify(cbp, tol);
    if (!cl.conjugate) {
        throw GeometryError("Koenigs test needs a conjugate checkerboard pattern", cl.planarity_residual);
    }
    QuadNet control = cbp.control() ? *cbp.control() : reconstruct_control_smooth(cbp, tol.par);
    KoenigsVerdict v;
    v.is_koenigs = true;
    for (int l = 1; l + 3 <= cbp.cols(); ++l) {
        for (int k = 1; k + 3 <= cbp.rows(); ++k) {
            FaceKoenigs fk;
            fk.face = {k, l};
            const SixPoints sp = six_points(cbp, fk.face);
            fk.degenerate = sp.degenerate;
            if (!sp.degenerate) {
                fk.conic_residual = koenigs_conic_residual(sp);
                v.max_conic_residual = std::max(v.max_conic_residual, *fk.conic_residual);
            } else {
                v.degenerate_faces.push_back(fk.face);
            }
            try {
                const double r = std::abs(one_form_closure_black(cbp, fk.face) - 1.0);
                if (std::isfinite(r)) {
                    fk.one_form_residual = r;
                    v.max_one_form_residual = std::max(v.max_one_form_residual, r);
                }
            } catch (const GeometryError&) {
            }
            const LaplaceInvariants li = laplace_invariants(control, fk.face, tol.plan);
            const double scale = std::max(std::abs(li.inv1), std::abs(li.inv2));
            fk.laplace_residual = scale > 0.0 ? std::abs(li.inv1 - li.inv2) / scale : 0.0;
            if (!std::isfinite(fk.laplace_residual)) {
                fk.laplace_residual = std::numeric_limits<double>::infinity();
            }
            if (!fk.one_form_residual && !fk.degenerate) {
                fk.degenerate = true;
                v.degenerate_faces.push_back(fk.face);
            }
            v.max_laplace_residual = std::max(v.max_laplace_residual, fk.laplace_residual);
            v.is_koenigs = v.is_koenigs && fk.laplace_residual <= tol.koenigs;
            v.faces.push_back(fk);
        }
    }
    return v;
}

double sine_ratio_product(const Checkerboard& cbp, GridIndex face) {
    if (!has_koenigs_patch(cbp, face)) {
        throw GeometryError("black face " + to_string(face) + " lacks its four white neighbours",
                            std::nullopt, face);
    }
    struct WhiteTerm {
        GridIndex v, s, s2, d;
    };
    const int k = face.k;
    const int l = face.l;
    const WhiteTerm terms[4] = {
        {{k + 1, l}, {k, l - 1}, {k + 1, l}, {k + 1, l - 1}},
        {{k + 1, l + 1}, {k + 1, l}, {k, l + 1}, {k + 1, l + 1}},
        {{k, l + 1}, {k, l + 1}, {k - 1, l}, {k - 1, l + 1}},
        {{k, l}, {k - 1, l}, {k, l - 1}, {k - 1, l - 1}},
    };
    double prod = 1.0;
    for (const WhiteTerm& t : terms) {
        const auto w = cbp.white_face(t.v.k, t.v.l);
        const GridIndex owners[4] = {t.v, shift(t.v, -1, 0), shift(t.v, -1, -1), shift(t.v, 0, -1)};
        auto edge = [&](GridIndex owner) {
            for (int i = 0; i < 4; ++i) {
                if (owners[i] == owner) {
                    return Vec3(w[(i + 1) % 4] - w[i]);
                }
            }
            throw std::logic_error("face does not border the white face");
        };
        const Vec3 eD = edge(t.d);
        const Vec3 a = eD.cross(edge(t.s));
        const Vec3 b = eD.cross(edge(t.s2));
        const double a2 = a.squaredNorm();
        if (!(a2 > 0.0)) {
            throw GeometryError("zero sine in the white face at " + to_string(t.v), std::nullopt, t.v);
        }
        prod *= -a.dot(b) / a2;
    }
    return prod;
}

QuadNet koenigs_generator_2d(const Mat3& M, const Mat3& N, const Vec3& P, IndexRange kr, IndexRange lr) {
    if (kr.last < kr.first || lr.last < lr.first) {
        throw std::invalid_argument("empty index range");
    }
    const Mat3 MN = M * N;
    const double mn = MN.norm();
    if (!(mn > 0.0) || (MN - N * M).norm() > 1e-12 * mn) {
        throw GeometryError("generator maps do not commute", mn > 0.0 ? (MN - N * M).norm() / mn : 0.0);
    }
    auto power = [](const Mat3& A, int e) {
        Mat3 base = A;
        if (e < 0) {
            Eigen::FullPivLU<Mat3> lu(A);
            if (!lu.isInvertible()) {
                throw GeometryError("generator map is singular");
            }
            base = lu.inverse();
            e = -e;
        }
        Mat3 out = Mat3::Identity();
        for (int i = 0; i < e; ++i) {
            out = out * base;
        }
        return out;
    };
    const int R = kr.last - kr.first + 1;
    const int C = lr.last - lr.first + 1;
    QuadNet net(R, C);
    const Mat3 M0 = power(M, kr.first);
    const Mat3 N0 = power(N, lr.first);
    Vec3 col = M0 * N0 * P;
    for (int k = 0; k < R; ++k) {
        Vec3 x = col;
        for (int l = 0; l < C; ++l) {
            if (!(std::abs(x[2]) > 1e-12 * x.norm())) {
                throw GeometryError("generated point at infinity", std::nullopt,
                                    GridIndex{kr.first + k, lr.first + l});
            }
            net(k, l) = Vec3(x[0] / x[2], x[1] / x[2], 0.0);
            x = N * x;
        }
        col = M * col;
    }
    return net;
}

double hyperbola_inscribed_residual(const Vec2& p1, const Vec2& p2, const Vec2& p3, const Vec2& p4) {
    const double den4 = (p4.x() - p1.x()) * (p4.y() - p2.y());
    const double den3 = (p3.x() - p1.x()) * (p3.y() - p2.y());
    if (den4 == 0.0 && den3 == 0.0) {
        throw GeometryError("both slope quotients are undefined");
    }
    return (p4.y() - p1.y()) * (p4.x() - p2.x()) * den3 - (p3.y() - p1.y()) * (p3.x() - p2.x()) * den4;
}

}  // namespace cbnet
