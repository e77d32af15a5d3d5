#pragma once

#include "cbnet/netcore.hpp"

#include <array>
#include <optional>
#include <vector>

namespace cbnet {

/// Homogeneous point (x, y, z) in the chart of a black-face plane with origin
/// c and axes c1 - c, c2 - c. Points at infinity have z = 0.
using PlanePointH = Vec3;

/// Line through two points, used for the neighbouring edges of a black face.
struct Segment {
    Vec3 a;
    Vec3 b;
};

/// A black face (c, c1, c12, c2) together with the opposite edges of the
/// four adjacent white faces:
///   opposite[0] meets l(c, c1)     -> p3
///   opposite[1] meets l(c2, c12)   -> p4
///   opposite[2] meets l(c, c2)     -> p5
///   opposite[3] meets l(c1, c12)   -> p6
struct BlackPatch {
    std::array<Vec3, 4> face;  // c, c1, c12, c2
    std::array<Segment, 4> opposite;
};

/// Interior black faces (k,l) with 1 <= k <= rows-3, 1 <= l <= cols-3 have
/// all four white neighbours.
bool has_koenigs_patch(const Checkerboard& cbp, GridIndex face);
BlackPatch black_patch(const Checkerboard& cbp, GridIndex face);

struct SixPoints {
    std::array<PlanePointH, 6> p;        // p1..p6, each scaled to unit length
    std::array<bool, 6> at_infinity{};
    double coplanarity_residual = 0.0;   // largest line-pair gap / edge length
    bool degenerate = false;             // two of the six points coincide
};

/// p1 and p2 are the exact ideal points of the parallelogram edges; p3..p6
/// are the intersections of the black-face lines with the opposite white
/// edges, in the plane of the white face.
SixPoints six_points(const BlackPatch& patch);
SixPoints six_points(const Checkerboard& cbp, GridIndex face);

/// Rows (x^2, xy, y^2, xz, yz, z^2), each divided by its largest magnitude.
Eigen::Matrix<double, 6, 6> conic_matrix(const std::array<PlanePointH, 6>& p);
double conic_residual(const std::array<PlanePointH, 6>& p);

/// For the six points of a black patch the determinant factors as
/// -W3 W4 W5 W6 D with p3 = (X3, 0, W3), p4 = (X4, W4, W4), p5 = (0, X5, W5),
/// p6 = (W6, X6, W6); a factor W vanishes only where two points coincide.
/// Returns |D| over the sum of the magnitudes of its six terms.
double koenigs_conic_residual(const SixPoints& sp);

/// Homogeneous parameter (X, W) of the intersection of the line a + t (b - a)
/// with the line through p and q, both taken in the least-squares plane of the
/// four points: t = X / W, W = 0 for parallel lines.
Vec2 line_parameter(const Vec3& a, const Vec3& b, const Vec3& p, const Vec3& q);

/// Edge `side` of black face `face`, oriented counterclockwise around the
/// black face: side 0 is m0 -> m1, ..., side 3 is m3 -> m0.
struct CbpEdge {
    GridIndex face;
    int side;
};

/// Control vertex at the centre of the white face containing the edge.
GridIndex edge_white_vertex(const CbpEdge& e);

/// Multiplicative one-form cr(g, g1, p, p') on a checkerboard edge, where p
/// is the ideal point of the black face and p' the focal point on the white
/// side. Computed from homogeneous line parameters, so p' may be ideal.
double one_form(const Checkerboard& cbp, const CbpEdge& e);

/// The same value from the control net, (b - P) / (a - P) after the affine
/// map x -> 2x - f.
double one_form_control(const QuadNet& net, const CbpEdge& e);

/// Product of the one-form over the four edges of a black face.
double one_form_closure_black(const Checkerboard& cbp, GridIndex face);

/// Product over the four edges of the white face of control vertex v.
double one_form_closure_white(const Checkerboard& cbp, GridIndex v);

struct LaplaceInvariants {
    double inv1;  // cr(f1, f2, P, Q)
    double inv2;  // cr(f, f12, P', Q')
};

/// Laplace invariants of control face (k,l); needs the two-ring.
LaplaceInvariants laplace_invariants(const QuadNet& net, GridIndex face, double tol_plan = 1e-8);

struct FaceKoenigs {
    GridIndex face;
    std::optional<double> conic_residual;  // empty on degenerate faces
    std::optional<double> one_form_residual;  // |prod q - 1|, empty if undefined
    double laplace_residual = 0.0;         // |inv1 - inv2| / max(|inv1|, |inv2|)
    bool degenerate = false;
};

struct KoenigsVerdict {
    bool is_koenigs = false;
    std::vector<FaceKoenigs> faces;
    double max_conic_residual = 0.0;
    double max_one_form_residual = 0.0;
    double max_laplace_residual = 0.0;
    std::vector<GridIndex> degenerate_faces;
};

/// The Laplace criterion decides; conic and one-form residuals are reported
/// alongside. Throws GeometryError if the pattern is not conjugate.
KoenigsVerdict is_koenigs(const Checkerboard& cbp, const Tolerances& tol = {});

/// Product over the four white faces around a black face of the signed
/// ratios of edge length times sine against the opposite edge.
double sine_ratio_product(const Checkerboard& cbp, GridIndex face);

struct IndexRange {
    int first;
    int last;  // inclusive
};

/// f(k,l) = M^k N^l P in the chart z = 1, embedded in the plane z = 0.
QuadNet koenigs_generator_2d(const Mat3& M, const Mat3& N, const Vec3& P, IndexRange k, IndexRange l);

/// (y4-y1)(x4-x2)(x3-x1)(y3-y2) - (y3-y1)(x3-x2)(x4-x1)(y4-y2): zero iff the
/// four points lie on a hyperbola y = c/x. Throws if both slope
/// denominators vanish.
double hyperbola_inscribed_residual(const Vec2& p1, const Vec2& p2, const Vec2& p3, const Vec2& p4);

enum class Orientation { reversing, preserving };

struct DualizationResult {
    Checkerboard dual;
    std::vector<double> scales;   // per black face, index l * (rows-1) + k
    double closure_residual = 0;  // largest white-face gap / largest scaled edge
    std::vector<double> white_residuals;  // per interior vertex, index (l-1) * (rows-2) + (k-1)
};

/// Scales with alpha(0,0) = alpha0 and alpha(1,0) = alpha1 propagated
/// breadth-first over white faces. Dual black faces are the originals scaled
/// by alpha; with `reversing` the dv edge is negated. Throws GeometryError if
/// the white faces do not close within tol.
DualizationResult dualize(const Checkerboard& cbp, double alpha0 = 1.0, double alpha1 = 1.0,
                          Orientation orientation = Orientation::reversing, double tol = 1e-8);

/// Same construction without the closure check.
DualizationResult dualize_unchecked(const Checkerboard& cbp, double alpha0, double alpha1,
                                    Orientation orientation);

/// Seeds (1, t) minimizing the squared differences of scales between
/// neighbouring black faces.
std::array<double, 2> smooth_dual_seed(const Checkerboard& cbp, Orientation orientation = Orientation::reversing);

}  // namespace cbnet
