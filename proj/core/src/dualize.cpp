#include "cbnet/koenigs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace cbnet {

namespace {

// Edge i of the white face at v runs from w_i to w_i+1 with
// w = (mid(v,v+k), mid(v,v+l), mid(v,v-k), mid(v,v-l)). Its owner is the
// black face containing it; edges 0 and 2 are dv edges of their owners,
// edges 1 and 3 are du edges.
struct WhiteEdges {
    std::array<GridIndex, 4> owner;
    std::array<Vec3, 4> e;
};

WhiteEdges white_edges(const Checkerboard& cbp, GridIndex v) {
    const auto w = cbp.white_face(v.k, v.l);
    WhiteEdges out;
    out.owner = {v, GridIndex{v.k - 1, v.l}, GridIndex{v.k - 1, v.l - 1}, GridIndex{v.k, v.l - 1}};
    for (int i = 0; i < 4; ++i) {
        out.e[i] = w[(i + 1) % 4] - w[i];
    }
    return out;
}

double white_sign(int i, Orientation o) { return (o == Orientation::reversing && i % 2 == 0) ? -1.0 : 1.0; }

// Side s of a black face is a du edge for s = 0, 2 and a dv edge for s = 1, 3.
double black_sign(int s, Orientation o) { return (o == Orientation::reversing && s % 2 == 1) ? -1.0 : 1.0; }

struct Scales {
    std::vector<double> alpha;
    std::vector<char> known;
};

Scales propagate(const Checkerboard& cbp, double alpha0, double alpha1, Orientation o) {
    const int FR = cbp.face_rows();
    const int FC = cbp.face_cols();
    if (cbp.rows() < 3 || cbp.cols() < 3) {
        throw GeometryError("dualization needs a control grid of at least 3x3 vertices");
    }
    auto fid = [&](GridIndex g) { return static_cast<std::size_t>(g.l) * FR + g.k; };
    Scales s{std::vector<double>(static_cast<std::size_t>(FR) * FC, 0.0),
             std::vector<char>(static_cast<std::size_t>(FR) * FC, 0)};
    s.alpha[fid({0, 0})] = alpha0;
    s.alpha[fid({1, 0})] = alpha1;
    s.known[fid({0, 0})] = s.known[fid({1, 0})] = 1;

    std::deque<GridIndex> queue;
    auto push_corners = [&](GridIndex f) {
        for (const GridIndex& v : {f, GridIndex{f.k + 1, f.l}, GridIndex{f.k + 1, f.l + 1}, GridIndex{f.k, f.l + 1}}) {
            if (cbp.has_white_face(v.k, v.l)) {
                queue.push_back(v);
            }
        }
    };
    push_corners({0, 0});
    push_corners({1, 0});
    while (!queue.empty()) {
        const GridIndex v = queue.front();
        queue.pop_front();
        const WhiteEdges we = white_edges(cbp, v);
        Vec3 rhs = Vec3::Zero();
        std::array<int, 4> unknown{};
        int nu = 0;
        for (int i = 0; i < 4; ++i) {
            const std::size_t id = fid(we.owner[i]);
            if (s.known[id]) {
                rhs -= white_sign(i, o) * s.alpha[id] * we.e[i];
            } else {
                unknown[nu++] = i;
            }
        }
        if (nu == 0 || nu > 2) {
            continue;
        }
        if (nu == 1) {
            const Vec3 a = white_sign(unknown[0], o) * we.e[unknown[0]];
            const double a2 = a.squaredNorm();
            if (!(a2 > 0.0)) {
                throw GeometryError("zero-length edge in the white face at " + to_string(v), std::nullopt, v);
            }
            s.alpha[fid(we.owner[unknown[0]])] = rhs.dot(a) / a2;
        } else {
            Eigen::Matrix<double, 3, 2> A;
            A.col(0) = white_sign(unknown[0], o) * we.e[unknown[0]];
            A.col(1) = white_sign(unknown[1], o) * we.e[unknown[1]];
            const double cross = A.col(0).cross(A.col(1)).norm();
            if (!(cross > 1e-14 * A.col(0).norm() * A.col(1).norm())) {
                throw GeometryError("degenerate cross product in the white face at " + to_string(v),
                                    std::nullopt, v);
            }
            const Vec2 x = A.colPivHouseholderQr().solve(rhs);
            s.alpha[fid(we.owner[unknown[0]])] = x[0];
            s.alpha[fid(we.owner[unknown[1]])] = x[1];
        }
        for (int j = 0; j < nu; ++j) {
            const GridIndex f = we.owner[unknown[j]];
            s.known[fid(f)] = 1;
            push_corners(f);
        }
    }
    for (int l = 0; l < FC; ++l) {
        for (int k = 0; k < FR; ++k) {
            if (!s.known[fid({k, l})]) {
                throw GeometryError("dual scale propagation did not reach face " + to_string({k, l}),
                                    std::nullopt, GridIndex{k, l});
            }
        }
    }
    return s;
}

}  // namespace

DualizationResult dualize_unchecked(const Checkerboard& cbp, double alpha0, double alpha1, Orientation o) {
    const Scales s = propagate(cbp, alpha0, alpha1, o);
    const int R = cbp.rows();
    const int C = cbp.cols();
    const int FR = cbp.face_rows();
    const int FC = cbp.face_cols();
    DualizationResult out;
    out.scales = s.alpha;
    auto alpha_at = [&](GridIndex f) { return s.alpha[static_cast<std::size_t>(f.l) * FR + f.k]; };

    for (int l = 1; l + 1 < C; ++l) {
        for (int k = 1; k + 1 < R; ++k) {
            const WhiteEdges we = white_edges(cbp, {k, l});
            Vec3 gap = Vec3::Zero();
            double scale = 0.0;
            for (int i = 0; i < 4; ++i) {
                const double a = alpha_at(we.owner[i]);
                gap += white_sign(i, o) * a * we.e[i];
                scale = std::max(scale, std::abs(a) * we.e[i].norm());
            }
            const double r = scale > 0.0 ? gap.norm() / scale : 0.0;
            out.white_residuals.push_back(r);
            out.closure_residual = std::max(out.closure_residual, r);
        }
    }

    // Place dual black faces breadth-first through shared vertices.
    std::vector<Vec3> pos(cbp.vertex_count(), Vec3::Zero());
    std::vector<char> placed(cbp.vertex_count(), 0);
    std::vector<char> done(static_cast<std::size_t>(FR) * FC, 0);
    std::deque<GridIndex> queue{{0, 0}};
    done[0] = 1;
    placed[cbp.black_face_ids(0, 0)[0]] = 1;
    pos[cbp.black_face_ids(0, 0)[0]] = cbp.black_face(0, 0)[0];
    while (!queue.empty()) {
        const GridIndex f = queue.front();
        queue.pop_front();
        const auto ids = cbp.black_face_ids(f.k, f.l);
        const auto m = cbp.black_face(f.k, f.l);
        int start = 0;
        while (!placed[ids[start]]) {
            ++start;
        }
        const double a = alpha_at(f);
        for (int step = 0; step < 3; ++step) {
            const int s = (start + step) % 4;
            const int t = (s + 1) % 4;
            if (!placed[ids[t]]) {
                pos[ids[t]] = pos[ids[s]] + black_sign(s, o) * a * (m[t] - m[s]);
                placed[ids[t]] = 1;
            }
        }
        for (const GridIndex& g : {GridIndex{f.k + 1, f.l}, GridIndex{f.k - 1, f.l}, GridIndex{f.k, f.l + 1},
                                   GridIndex{f.k, f.l - 1}}) {
            if (cbp.has_black_face(g.k, g.l) && !done[static_cast<std::size_t>(g.l) * FR + g.k]) {
                done[static_cast<std::size_t>(g.l) * FR + g.k] = 1;
                queue.push_back(g);
            }
        }
    }
    const std::size_t nk = static_cast<std::size_t>(R - 1) * C;
    std::vector<Vec3> km(pos.begin(), pos.begin() + nk);
    std::vector<Vec3> lm(pos.begin() + nk, pos.end());
    out.dual = Checkerboard(R, C, std::move(km), std::move(lm));
    return out;
}

DualizationResult dualize(const Checkerboard& cbp, double alpha0, double alpha1, Orientation o, double tol) {
    if (!(alpha0 > 0.0) || !(alpha1 > 0.0)) {
        throw std::invalid_argument("dual seed scales must be positive");
    }
    DualizationResult r = dualize_unchecked(cbp, alpha0, alpha1, o);
    if (!(r.closure_residual <= tol)) {
        throw GeometryError("white faces of the dual do not close: the pattern is not Koenigs",
                            r.closure_residual);
    }
    return r;
}

std::array<double, 2> smooth_dual_seed(const Checkerboard& cbp, Orientation o) {
    const Scales A = propagate(cbp, 1.0, 0.0, o);
    const Scales B = propagate(cbp, 0.0, 1.0, o);
    const int FR = cbp.face_rows();
    const int FC = cbp.face_cols();
    double num = 0.0;
    double den = 0.0;
    for (int l = 0; l < FC; ++l) {
        for (int k = 0; k < FR; ++k) {
            const std::size_t i = static_cast<std::size_t>(l) * FR + k;
            for (const std::size_t j : {i + 1, i + static_cast<std::size_t>(FR)}) {
                const bool ok = (j == i + 1) ? (k + 1 < FR) : (l + 1 < FC);
                if (!ok) {
                    continue;
                }
                const double da = A.alpha[i] - A.alpha[j];
                const double db = B.alpha[i] - B.alpha[j];
                num += da * db;
                den += db * db;
            }
        }
    }
    return {1.0, den > 0.0 ? -num / den : 1.0};
}

}  // namespace cbnet
