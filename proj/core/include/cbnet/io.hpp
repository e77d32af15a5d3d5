#pragma once

#include "cbnet/isothermic.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cbnet {

class QnetError : public IoError {
public:
    enum class Kind { malformed_header, count_mismatch, non_finite, malformed_vertex };

    QnetError(Kind kind, const std::string& what) : IoError(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// QNET text format:
///   QNET 1
///   rows R cols C
///   x y z            (R*C lines, vertex (k,l) on line l*R + k)
/// Blank lines are ignored. Coordinates are written with 17 significant digits.
QuadNet read_qnet(std::istream& in);
QuadNet read_qnet(const std::string& path);
void write_qnet(const QuadNet& net, std::ostream& out);
void write_qnet(const QuadNet& net, const std::string& path);

/// Control net as quads (f, f1, f12, f2); indices are 1-based.
void export_obj(const QuadNet& net, std::ostream& out);
void export_obj(const QuadNet& net, const std::string& path);

/// Checkerboard vertices, then groups "black" and "white".
void export_obj(const Checkerboard& cbp, std::ostream& out);
void export_obj(const Checkerboard& cbp, const std::string& path);

struct Provenance {
    std::string input;
    std::string command;
    std::string version;
};

struct CurvatureRow {
    GridIndex face;
    double kappa1;
    double kappa2;
    double H;
    double K;
    Vec2 dir1;
    Vec2 dir2;
};

struct AnalysisReport {
    Classification classification;
    std::optional<KoenigsVerdict> koenigs;  // empty if the test did not apply
    std::string koenigs_note;
    bool isothermic = false;
    std::vector<CurvatureRow> curvature;    // faces with four vertex normals
    Tolerances tolerances;
    Provenance provenance;
};

/// Classification, Koenigs verdict and curvature table of a control net.
AnalysisReport analyze(const QuadNet& net, const Tolerances& tol = {}, Provenance provenance = {});

std::string to_json(const AnalysisReport& report);
std::string to_json(const MinimalResult& result, const Provenance& provenance);

}  // namespace cbnet
