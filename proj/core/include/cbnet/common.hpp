#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace cbnet {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Integer grid position. Increasing k or l is the "shift" f_1 resp. f_2.
struct GridIndex {
    int k = 0;
    int l = 0;

    friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

/// Tolerances are dimensionless. Each one is applied to a residual that is
/// already normalized by a local length scale.
struct Tolerances {
    double par = 1e-8;
    double orth = 1e-8;
    double plan = 1e-8;
    double koenigs = 1e-8;
    double eq = 1e-9;

    /// Throws std::invalid_argument unless every tolerance is positive.
    void validate() const;
};

/// Root of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A geometric precondition of an operation does not hold for the input:
/// wrong net class, degenerate configuration, failed closure.
class GeometryError : public Error {
public:
    explicit GeometryError(const std::string& what,
                           std::optional<double> residual = std::nullopt,
                           std::optional<GridIndex> where = std::nullopt);

    const std::optional<double>& residual() const { return residual_; }
    const std::optional<GridIndex>& where() const { return where_; }

private:
    std::optional<double> residual_;
    std::optional<GridIndex> where_;
};

/// Reading or writing files failed.
class IoError : public Error {
public:
    using Error::Error;
};

std::string to_string(const GridIndex& g);

}  // namespace cbnet
