#pragma once

#include "cbnet/netcore.hpp"

#include <array>
#include <optional>
#include <vector>

namespace cbnet {

/// Per-vertex normals n(k,l) on the grid of a control net. Vertex normals
/// exist only at interior vertices; a principal Gauss image may fill every
/// vertex and need not be unit length.
class GaussNet {
public:
    GaussNet() = default;
    GaussNet(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool has(int k, int l) const;
    const Vec3& operator()(int k, int l) const;
    void set(int k, int l, const Vec3& n);

    /// Dense net holding every vertex; throws if any vertex is missing.
    QuadNet to_net() const;
    static GaussNet from_net(const QuadNet& net);

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Vec3> normals_;
    std::vector<char> valid_;
};

/// n = (f1 - f-1) x (f2 - f-2), normalized. Throws GeometryError at a
/// boundary vertex or when the cross product vanishes.
Vec3 vertex_normal(const QuadNet& net, int k, int l);

/// Unit vertex normals at all interior vertices.
GaussNet vertex_normals(const QuadNet& net);

struct FaceNormalArea {
    Vec3 normal;
    double area;
};

/// Quad given as (f, f1, f12, f2). N is the normalized diagonal cross
/// product, area = det(du, dv, N).
FaceNormalArea face_normal_and_area(const std::array<Vec3, 4>& quad);

/// Control face (k,l) as (f, f1, f12, f2).
std::array<Vec3, 4> control_face(const QuadNet& net, GridIndex face);

/// Gauss quad (n, n1, n12, n2) of a face; throws if a normal is missing.
std::array<Vec3, 4> gauss_face(const GaussNet& gauss, GridIndex face);

struct FundamentalForms {
    Mat2 I;   // <d_i f, d_j f>
    Mat2 II;  // <d_i f, d_j n>
};

FundamentalForms fundamental_forms(const QuadNet& net, const GaussNet& gauss, GridIndex face);

struct ShapeResult {
    Mat2 sigma;      // coordinates of the shape operator in the basis (du, dv)
    double kappa1;   // kappa1 >= kappa2
    double kappa2;
    Vec2 dir1;       // unit I-norm, first nonzero coordinate positive
    Vec2 dir2;
    Vec3 face_normal;
    FundamentalForms forms;
};

/// Shape operator Sigma = I^-1 II of a face. sym_tol decides when II is
/// treated as symmetric (relative to its largest entry).
ShapeResult shape_operator(const QuadNet& net, const GaussNet& gauss, GridIndex face,
                           double sym_tol = 1e-10);

/// Faces (k,l) whose four corners all carry a normal.
bool has_curvature(const GaussNet& gauss, GridIndex face);

/// Shape results for every face; faces without a full set of normals are empty.
std::vector<std::optional<ShapeResult>> curvature_table(const QuadNet& net, const GaussNet& gauss);

/// A(Qa, Qb) = (det(du a, dv b, N) + det(du b, dv a, N)) / 2. N is the face
/// normal of qa; throws GeometryError if qb is not parallel to it within tol.
double mixed_area(const std::array<Vec3, 4>& qa, const std::array<Vec3, 4>& qb, double tol = 1e-8);

struct MixedAreaCurvatures {
    double H;
    double K;
    double area;       // A(Qf, Qf)
    double det_I;      // det of the first fundamental form
};

MixedAreaCurvatures curvatures_via_mixed_area(const QuadNet& net, const GaussNet& gauss, GridIndex face);

/// Generalized area det(du, dv, N) of the offset quad f_i + t n_i, where N
/// is the normal of the unshifted face.
double offset_area(const QuadNet& net, const GaussNet& gauss, GridIndex face, double t);

/// |area(offset) - (1 + t tr S + t^2 det S) area| / |area|.
double steiner_residual(const QuadNet& net, const GaussNet& gauss, GridIndex face, double t);

}  // namespace cbnet
