#pragma once

#include "cbnet/common.hpp"

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace cbnet {

/// Rectangular grid of points f(k,l), 0 <= k < rows, 0 <= l < cols.
/// Vertex (k,l) is stored at index l * rows + k.
class QuadNet {
public:
    QuadNet() = default;
    QuadNet(int rows, int cols);
    QuadNet(int rows, int cols, std::vector<Vec3> vertices);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return vertices_.size(); }
    bool empty() const { return vertices_.empty(); }

    bool contains(int k, int l) const { return k >= 0 && l >= 0 && k < rows_ && l < cols_; }
    std::size_t index(int k, int l) const { return static_cast<std::size_t>(l) * rows_ + k; }

    const Vec3& operator()(int k, int l) const { return vertices_[index(k, l)]; }
    Vec3& operator()(int k, int l) { return vertices_[index(k, l)]; }
    const Vec3& at(int k, int l) const;

    const std::vector<Vec3>& vertices() const { return vertices_; }

    /// Length of the bounding-box diagonal.
    double diameter() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Vec3> vertices_;
};

/// Checkerboard pattern inscribed in a control grid of size rows x cols.
///
/// Vertices are the midpoints of control edges. k-edges run from (k,l) to
/// (k+1,l), l-edges from (k,l) to (k,l+1). Vertex ids number all k-edge
/// midpoints first, then the l-edge midpoints.
///
/// The black face of control face (k,l) is (m0, m1, m2, m3) with
///   m0 = mid(f, f1), m1 = mid(f1, f12), m2 = mid(f12, f2), m3 = mid(f2, f).
/// The white face of an interior control vertex (k,l) is, counterclockwise,
///   mid(f, f1), mid(f, f2), mid(f, f-1), mid(f, f-2).
class Checkerboard {
public:
    Checkerboard() = default;
    Checkerboard(int rows, int cols, std::vector<Vec3> kmids, std::vector<Vec3> lmids);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int face_rows() const { return rows_ - 1; }
    int face_cols() const { return cols_ - 1; }

    std::size_t vertex_count() const { return kmids_.size() + lmids_.size(); }
    std::size_t kmid_id(int k, int l) const { return static_cast<std::size_t>(l) * (rows_ - 1) + k; }
    std::size_t lmid_id(int k, int l) const {
        return kmids_.size() + static_cast<std::size_t>(l) * rows_ + k;
    }
    const Vec3& vertex(std::size_t id) const;
    const Vec3& kmid(int k, int l) const { return kmids_[kmid_id(k, l)]; }
    const Vec3& lmid(int k, int l) const { return lmids_[static_cast<std::size_t>(l) * rows_ + k]; }

    bool has_black_face(int k, int l) const { return k >= 0 && l >= 0 && k < rows_ - 1 && l < cols_ - 1; }
    bool has_white_face(int k, int l) const { return k >= 1 && l >= 1 && k < rows_ - 1 && l < cols_ - 1; }

    std::array<std::size_t, 4> black_face_ids(int k, int l) const;
    std::array<Vec3, 4> black_face(int k, int l) const;
    std::array<std::size_t, 4> white_face_ids(int k, int l) const;
    std::array<Vec3, 4> white_face(int k, int l) const;

    /// Control net this pattern was built from, if known.
    const QuadNet* control() const { return control_.get(); }
    void set_control(QuadNet net);

    double diameter() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Vec3> kmids_;
    std::vector<Vec3> lmids_;
    std::shared_ptr<const QuadNet> control_;
};

Checkerboard build_checkerboard(const QuadNet& net);

/// Control net with f(0,0) = seed; every other vertex is the reflection of a
/// neighbour through the connecting checkerboard vertex. Throws GeometryError
/// carrying the largest disagreement (relative to the diameter) when the
/// reflections along different paths disagree by more than tol_par.
QuadNet reconstruct_control(const Checkerboard& cbp, const Vec3& seed, double tol_par = 1e-8);

/// Member of the three-parameter family of control nets with the smallest
/// sum of squared control edge lengths (no zig-zag component).
QuadNet reconstruct_control_smooth(const Checkerboard& cbp, double tol_par = 1e-8);

struct EdgeVectors {
    Vec3 du;  // (f12 - f) / sqrt(2)
    Vec3 dv;  // (f2 - f1) / sqrt(2)
};

EdgeVectors face_edge_vectors(const Checkerboard& cbp, GridIndex face);
EdgeVectors face_edge_vectors(const std::array<Vec3, 4>& quad);

/// |<du,dv>| / (|du| |dv|) of a black face; nullopt if an edge vanishes.
std::optional<double> orthogonality_residual(const Checkerboard& cbp, GridIndex face);

/// Largest distance of the four points to their least-squares plane, divided
/// by the largest pairwise distance; nullopt if all four coincide.
std::optional<double> planarity_residual(const std::array<Vec3, 4>& quad);

struct Classification {
    bool orthogonal = false;
    double orthogonality_residual = 0.0;
    bool conjugate = false;
    double planarity_residual = 0.0;
    bool principal = false;
    std::vector<GridIndex> degenerate_black;
    std::vector<GridIndex> degenerate_white;
};

Classification classify(const Checkerboard& cbp, const Tolerances& tol = {});

}  // namespace cbnet
