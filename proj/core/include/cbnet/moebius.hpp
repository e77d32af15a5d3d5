#pragma once

#include "cbnet/curvature.hpp"
#include "cbnet/netcore.hpp"

#include <variant>
#include <vector>

namespace cbnet {

/// Coordinates with respect to e1..e5 of R^{4,1}.
using MinkowskiVector = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

/// <<a,b>> = a1 b1 + a2 b2 + a3 b3 + a4 b4 - a5 b5.
double minkowski_inner(const MinkowskiVector& a, const MinkowskiVector& b);

/// J = diag(1,1,1,1,-1).
Mat5 minkowski_metric();

MinkowskiVector basis_vector(int i);  // e_i, i = 1..5
MinkowskiVector e_zero();             // (e5 - e4) / 2
MinkowskiVector e_infinity();         // (e4 + e5) / 2

/// Coefficients (x, lambda, mu) of v = x + lambda e0 + mu e_inf.
struct LightConeCoordinates {
    Vec3 x;
    double lambda;
    double mu;
};
LightConeCoordinates light_cone_coordinates(const MinkowskiVector& v);
MinkowskiVector from_light_cone_coordinates(const Vec3& x, double lambda, double mu);

/// Element of the projectivization; the representative is any nonzero vector.
struct ProjectivePoint {
    MinkowskiVector rep;

    /// Representative scaled to unit Euclidean length.
    MinkowskiVector normalized() const;
};

/// True if a and b span the same line, compared after normalizing both to
/// unit length (up to sign).
bool projectively_equal(const ProjectivePoint& a, const ProjectivePoint& b, double tol = 1e-12);

struct Sphere {
    Vec3 center;
    double r2;  // may be zero or negative
};

struct Plane {
    Vec3 normal;  // unit
    double offset;  // <normal, x> = offset
};

class SphereOrPlane {
public:
    static SphereOrPlane sphere(const Vec3& center, double r2);
    static SphereOrPlane point(const Vec3& p) { return sphere(p, 0.0); }
    static SphereOrPlane plane(const Vec3& normal, double offset);

    bool is_sphere() const { return std::holds_alternative<Sphere>(v_); }
    bool is_plane() const { return std::holds_alternative<Plane>(v_); }
    const Sphere& as_sphere() const;
    const Plane& as_plane() const;

private:
    explicit SphereOrPlane(std::variant<Sphere, Plane> v) : v_(v) {}
    std::variant<Sphere, Plane> v_;
};

/// Thrown by unlift for multiples of e_inf.
class PointAtInfinity : public GeometryError {
public:
    PointAtInfinity() : GeometryError("projective point is the point at infinity") {}
};

/// Sphere (c, r2) -> [c + e0 + (|c|^2 - r2) e_inf]; plane (n, d) -> [n + 2d e_inf].
ProjectivePoint lift(const SphereOrPlane& s);

/// Inverse of lift. The e0-coefficient decides sphere versus plane; it is
/// treated as zero when below rel_tol times the norm of the representative.
SphereOrPlane unlift(const ProjectivePoint& p, double rel_tol = 1e-13);

struct OrthogonalityCheck {
    bool orthogonal;
    /// |<<a,b>>| for representatives of unit Euclidean length.
    double lifted_residual;
    /// Sphere pairs only: | |c1-c2|^2 - r1^2 - r2^2 | / (|c1-c2|^2 + |r1^2| + |r2^2|).
    std::optional<double> euclidean_residual;
    /// Sphere pairs only: the same quantity evaluated as 2|<<a,b>>| with
    /// e0-normalized lifts, over the same scale.
    std::optional<double> lifted_euclidean_residual;
};

/// The flag uses the Euclidean residual for sphere pairs and the lifted
/// residual otherwise.
OrthogonalityCheck orthogonal(const SphereOrPlane& a, const SphereOrPlane& b, double tol = 1e-8);

/// One member per vertex of a grid.
class SphereCongruence {
public:
    SphereCongruence() = default;
    SphereCongruence(int rows, int cols, std::vector<SphereOrPlane> members);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const SphereOrPlane& operator()(int k, int l) const {
        return members_[static_cast<std::size_t>(l) * rows_ + k];
    }
    const std::vector<SphereOrPlane>& members() const { return members_; }

    /// Net of sphere centers; throws GeometryError naming the first plane.
    QuadNet centers() const;

    /// Largest normalized orthogonality residual over grid-adjacent pairs.
    double max_adjacent_residual() const;

    std::vector<ProjectivePoint> lifted() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<SphereOrPlane> members_;
};

/// Squared radii from r^2(0,0) = r0sq and r_i^2 = |f - f_i|^2 - r^2 along
/// the first column, then along every row. Edges not used by the propagation
/// are checked; a residual above tol throws GeometryError.
SphereCongruence build_congruence(const QuadNet& net, double r0sq, double tol = 1e-8);

/// Acts on the coordinates e1..e5 by x -> T x.
class MoebiusTransform {
public:
    MoebiusTransform() : T_(Mat5::Identity()) {}
    explicit MoebiusTransform(const Mat5& T) : T_(T) {}

    static MoebiusTransform identity() { return MoebiusTransform(); }
    static MoebiusTransform rotation(const Mat3& R);
    static MoebiusTransform translation(const Vec3& t);
    static MoebiusTransform scaling(double lambda);
    static MoebiusTransform sphere_inversion(const Vec3& center, double r2);

    const Mat5& matrix() const { return T_; }
    bool is_identity() const { return T_ == Mat5::Identity(); }

    /// this * other: apply other first.
    MoebiusTransform operator*(const MoebiusTransform& other) const {
        return MoebiusTransform(T_ * other.T_);
    }

    ProjectivePoint apply(const ProjectivePoint& p) const { return {T_ * p.rep}; }
    SphereOrPlane apply(const SphereOrPlane& s) const { return unlift(apply(lift(s))); }

    /// ||T^T J T - s J|| / ||s J|| for the best positive scale s; infinite if
    /// no positive scale fits.
    double lorentz_residual() const;

private:
    Mat5 T_;
};

struct MoebiusImage {
    SphereCongruence congruence;
    QuadNet net;  // centers of the transformed spheres
};

/// Throws GeometryError naming the vertex whose sphere becomes a plane or the
/// point at infinity.
MoebiusImage apply_moebius(const MoebiusTransform& T, const SphereCongruence& cong);

struct PseudoPrincipalCheck {
    bool pseudo_principal;
    bool orthogonal;
    double orthogonality_residual;
    bool conjugate;
    double conjugacy_residual;
};

/// Grid of lifted points, vertex (k,l) at index l * rows + k.
PseudoPrincipalCheck is_pseudo_principal(const std::vector<ProjectivePoint>& lifted, int rows, int cols,
                                         double tol = 1e-8);

struct PrincipalGaussImage {
    GaussNet gauss;               // every vertex, not unit length
    SphereCongruence spheres;     // centers gauss(k,l), r^2 = |n|^2 - 1
    double parallel_residual = 0; // largest sine of angle between corresponding edges
    double polarity_residual = 0; // largest |<n, n_i> - 1| over adjacent vertices
    double sphere_residual = 0;   // largest orthogonality residual against S^2
};

/// Principal Gauss image grown breadth-first from `start` with n(start) =
/// seed. The seed must be parallel to the normal of the white face at start.
/// Corner vertices are not fixed by the polarity conditions; there the
/// missing image edge is the net's edge scaled by the mean scale factor of the
/// same edge direction on the adjacent faces.
PrincipalGaussImage principal_gauss_image(const QuadNet& net, GridIndex start, const Vec3& seed,
                                          double tol = 1e-8);

/// Normal of the least-squares plane of the white face at an interior vertex,
/// oriented like the vertex normal.
Vec3 white_face_normal(const QuadNet& net, GridIndex v);

}  // namespace cbnet
