#include "cbnet/netcore.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbnet {

void Tolerances::validate() const {
    for (double t : {par, orth, plan, koenigs, eq}) {
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw std::invalid_argument("tolerances must be positive and finite");
        }
    }
}

GeometryError::GeometryError(const std::string& what, std::optional<double> residual,
                             std::optional<GridIndex> where)
    : Error(what), residual_(residual), where_(where) {}

std::string to_string(const GridIndex& g) {
    return "(" + std::to_string(g.k) + "," + std::to_string(g.l) + ")";
}

QuadNet::QuadNet(int rows, int cols) : QuadNet(rows, cols, std::vector<Vec3>(
    static_cast<std::size_t>(std::max(rows, 0)) * std::max(cols, 0), Vec3::Zero())) {}

QuadNet::QuadNet(int rows, int cols, std::vector<Vec3> vertices)
    : rows_(rows), cols_(cols), vertices_(std::move(vertices)) {
    if (rows < 0 || cols < 0) {
        throw std::invalid_argument("negative grid size");
    }
    if (vertices_.size() != static_cast<std::size_t>(rows) * cols) {
        throw std::invalid_argument("vertex count does not match rows*cols");
    }
}

const Vec3& QuadNet::at(int k, int l) const {
    if (!contains(k, l)) {
        throw std::out_of_range("grid index " + to_string({k, l}) + " outside net");
    }
    return (*this)(k, l);
}

static double bbox_diagonal(const std::vector<Vec3>& a, const std::vector<Vec3>& b = {}) {
    if (a.empty() && b.empty()) {
        return 0.0;
    }
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const auto* v : {&a, &b}) {
        for (const Vec3& p : *v) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
    }
    return (hi - lo).norm();
}

double QuadNet::diameter() const { return bbox_diagonal(vertices_); }

Checkerboard::Checkerboard(int rows, int cols, std::vector<Vec3> kmids, std::vector<Vec3> lmids)
    : rows_(rows), cols_(cols), kmids_(std::move(kmids)), lmids_(std::move(lmids)) {
    if (rows < 2 || cols < 2) {
        throw std::invalid_argument("checkerboard needs a control grid of at least 2x2");
    }
    if (kmids_.size() != static_cast<std::size_t>(rows - 1) * cols ||
        lmids_.size() != static_cast<std::size_t>(rows) * (cols - 1)) {
        throw std::invalid_argument("checkerboard vertex arrays have the wrong size");
    }
}

const Vec3& Checkerboard::vertex(std::size_t id) const {
    return id < kmids_.size() ? kmids_[id] : lmids_.at(id - kmids_.size());
}

std::array<std::size_t, 4> Checkerboard::black_face_ids(int k, int l) const {
    return {kmid_id(k, l), lmid_id(k + 1, l), kmid_id(k, l + 1), lmid_id(k, l)};
}

std::array<Vec3, 4> Checkerboard::black_face(int k, int l) const {
    if (!has_black_face(k, l)) {
        throw std::out_of_range("no black face at " + to_string({k, l}));
    }
    return {kmid(k, l), lmid(k + 1, l), kmid(k, l + 1), lmid(k, l)};
}

std::array<std::size_t, 4> Checkerboard::white_face_ids(int k, int l) const {
    return {kmid_id(k, l), lmid_id(k, l), kmid_id(k - 1, l), lmid_id(k, l - 1)};
}

std::array<Vec3, 4> Checkerboard::white_face(int k, int l) const {
    if (!has_white_face(k, l)) {
        throw std::out_of_range("no white face at " + to_string({k, l}));
    }
    return {kmid(k, l), lmid(k, l), kmid(k - 1, l), lmid(k, l - 1)};
}

void Checkerboard::set_control(QuadNet net) {
    if (net.rows() != rows_ || net.cols() != cols_) {
        throw std::invalid_argument("control net size does not match checkerboard");
    }
    control_ = std::make_shared<const QuadNet>(std::move(net));
}

double Checkerboard::diameter() const { return bbox_diagonal(kmids_, lmids_); }

Checkerboard build_checkerboard(const QuadNet& net) {
    const int R = net.rows();
    const int C = net.cols();
    if (R < 2 || C < 2) {
        throw GeometryError("checkerboard needs a control net of at least 2x2 vertices");
    }
    std::vector<Vec3> km(static_cast<std::size_t>(R - 1) * C);
    std::vector<Vec3> lm(static_cast<std::size_t>(R) * (C - 1));
    for (int l = 0; l < C; ++l) {
        for (int k = 0; k + 1 < R; ++k) {
            km[static_cast<std::size_t>(l) * (R - 1) + k] = 0.5 * (net(k, l) + net(k + 1, l));
        }
    }
    for (int l = 0; l + 1 < C; ++l) {
        for (int k = 0; k < R; ++k) {
            lm[static_cast<std::size_t>(l) * R + k] = 0.5 * (net(k, l) + net(k, l + 1));
        }
    }
    Checkerboard cbp(R, C, std::move(km), std::move(lm));
    cbp.set_control(net);
    return cbp;
}

namespace {

QuadNet reflect_from(const Checkerboard& cbp, const Vec3& seed) {
    QuadNet f(cbp.rows(), cbp.cols());
    f(0, 0) = seed;
    for (int k = 0; k + 1 < cbp.rows(); ++k) {
        f(k + 1, 0) = 2.0 * cbp.kmid(k, 0) - f(k, 0);
    }
    for (int l = 0; l + 1 < cbp.cols(); ++l) {
        for (int k = 0; k < cbp.rows(); ++k) {
            f(k, l + 1) = 2.0 * cbp.lmid(k, l) - f(k, l);
        }
    }
    return f;
}

void check_reflections(const Checkerboard& cbp, const QuadNet& f, double tol_par) {
    const double scale = std::max(cbp.diameter(), std::numeric_limits<double>::min());
    double worst = 0.0;
    for (int l = 1; l < cbp.cols(); ++l) {
        for (int k = 0; k + 1 < cbp.rows(); ++k) {
            const Vec3 other = 2.0 * cbp.kmid(k, l) - f(k, l);
            worst = std::max(worst, (other - f(k + 1, l)).norm() / scale);
        }
    }
    if (!(worst <= tol_par)) {
        throw GeometryError("checkerboard has no control net: reflection paths disagree by " +
                                std::to_string(worst),
                            worst);
    }
}

}  // namespace

QuadNet reconstruct_control(const Checkerboard& cbp, const Vec3& seed, double tol_par) {
    QuadNet f = reflect_from(cbp, seed);
    check_reflections(cbp, f, tol_par);
    return f;
}

QuadNet reconstruct_control_smooth(const Checkerboard& cbp, double tol_par) {
    QuadNet f = reflect_from(cbp, Vec3::Zero());
    check_reflections(cbp, f, tol_par);
    // Adding (-1)^(k+l) delta changes every edge vector by -+2 delta.
    Vec3 acc = Vec3::Zero();
    double count = 0.0;
    for (int l = 0; l < f.cols(); ++l) {
        for (int k = 0; k < f.rows(); ++k) {
            const double s = ((k + l) % 2 == 0) ? 1.0 : -1.0;
            if (k + 1 < f.rows()) {
                acc += -2.0 * s * (f(k + 1, l) - f(k, l));
                count += 4.0;
            }
            if (l + 1 < f.cols()) {
                acc += -2.0 * s * (f(k, l + 1) - f(k, l));
                count += 4.0;
            }
        }
    }
    const Vec3 delta = count > 0.0 ? Vec3(-acc / count) : Vec3::Zero();
    for (int l = 0; l < f.cols(); ++l) {
        for (int k = 0; k < f.rows(); ++k) {
            f(k, l) += ((k + l) % 2 == 0 ? 1.0 : -1.0) * delta;
        }
    }
    return f;
}

EdgeVectors face_edge_vectors(const std::array<Vec3, 4>& quad) {
    // quad = (f, f1, f12, f2)
    return {(quad[2] - quad[0]) / std::sqrt(2.0), (quad[3] - quad[1]) / std::sqrt(2.0)};
}

EdgeVectors face_edge_vectors(const Checkerboard& cbp, GridIndex face) {
    const auto m = cbp.black_face(face.k, face.l);
    return {std::sqrt(2.0) * (m[1] - m[0]), std::sqrt(2.0) * (m[2] - m[1])};
}

namespace {

double edge_floor(const Checkerboard& cbp) { return std::max(cbp.diameter(), 1.0) * 1e-14; }

std::optional<double> orthogonality_residual(const Checkerboard& cbp, GridIndex face, double floor) {
    const EdgeVectors e = face_edge_vectors(cbp, face);
    const double nu = e.du.norm();
    const double nv = e.dv.norm();
    if (nu <= floor || nv <= floor) {
        return std::nullopt;
    }
    return std::abs(e.du.dot(e.dv)) / (nu * nv);
}

}  // namespace

std::optional<double> orthogonality_residual(const Checkerboard& cbp, GridIndex face) {
    return orthogonality_residual(cbp, face, edge_floor(cbp));
}

std::optional<double> planarity_residual(const std::array<Vec3, 4>& quad) {
    double diam = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            diam = std::max(diam, (quad[i] - quad[j]).norm());
        }
    }
    if (!(diam > 0.0)) {
        return std::nullopt;
    }
    const Vec3 centroid = 0.25 * (quad[0] + quad[1] + quad[2] + quad[3]);
    Eigen::Matrix<double, 4, 3> A;
    for (int i = 0; i < 4; ++i) {
        A.row(i) = (quad[i] - centroid).transpose();
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>> svd(A, Eigen::ComputeFullV);
    const Vec3 normal = svd.matrixV().col(2);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        worst = std::max(worst, std::abs(normal.dot(quad[i] - centroid)));
    }
    return worst / diam;
}

Classification classify(const Checkerboard& cbp, const Tolerances& tol) {
    Classification out;
    const double floor = edge_floor(cbp);
    for (int l = 0; l < cbp.face_cols(); ++l) {
        for (int k = 0; k < cbp.face_rows(); ++k) {
            const auto r = orthogonality_residual(cbp, {k, l}, floor);
            if (!r) {
                out.degenerate_black.push_back({k, l});
                continue;
            }
            out.orthogonality_residual = std::max(out.orthogonality_residual, *r);
        }
    }
    for (int l = 1; l + 1 < cbp.cols(); ++l) {
        for (int k = 1; k + 1 < cbp.rows(); ++k) {
            const auto r = planarity_residual(cbp.white_face(k, l));
            if (!r) {
                out.degenerate_white.push_back({k, l});
                continue;
            }
            out.planarity_residual = std::max(out.planarity_residual, *r);
        }
    }
    out.orthogonal = out.orthogonality_residual <= tol.orth;
    out.conjugate = out.planarity_residual <= tol.plan;
    out.principal = out.orthogonal && out.conjugate;
    return out;
}

}  // namespace cbnet
