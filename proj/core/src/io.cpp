#include "cbnet/io.hpp"

#include "cbnet/curvature.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cbnet {

namespace {

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

std::vector<std::string_view> tokens(const std::string& s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) {
            ++i;
        }
        const std::size_t j = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') {
            ++i;
        }
        if (i > j) {
            out.emplace_back(s.data() + j, i - j);
        }
    }
    return out;
}

template <class T>
bool parse(std::string_view t, T& v) {
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    return r.ec == std::errc() && r.ptr == t.data() + t.size();
}

bool next_line(std::istream& in, std::string& line, std::size_t& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        if (!blank(line)) {
            return true;
        }
    }
    return false;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) {
        throw IoError("write to " + path + " failed");
    }
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

QuadNet read_qnet(std::istream& in) {
    using K = QnetError::Kind;
    std::string line;
    std::size_t lineno = 0;
    if (!next_line(in, line, lineno)) {
        throw QnetError(K::malformed_header, "empty QNET document");
    }
    auto t = tokens(line);
    int version = 0;
    if (t.size() != 2 || t[0] != "QNET" || !parse(t[1], version) || version != 1) {
        throw QnetError(K::malformed_header, "line " + std::to_string(lineno) + ": expected 'QNET 1'");
    }
    if (!next_line(in, line, lineno)) {
        throw QnetError(K::malformed_header, "missing 'rows R cols C' line");
    }
    t = tokens(line);
    int rows = 0;
    int cols = 0;
    if (t.size() != 4 || t[0] != "rows" || t[2] != "cols" || !parse(t[1], rows) || !parse(t[3], cols) ||
        rows < 0 || cols < 0) {
        throw QnetError(K::malformed_header, "line " + std::to_string(lineno) + ": expected 'rows R cols C'");
    }
    const std::size_t expected = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    std::vector<Vec3> v;
    v.reserve(expected);
    while (next_line(in, line, lineno)) {
        t = tokens(line);
        Vec3 p;
        if (t.size() != 3 || !parse(t[0], p[0]) || !parse(t[1], p[1]) || !parse(t[2], p[2])) {
            throw QnetError(K::malformed_vertex, "line " + std::to_string(lineno) + ": expected three numbers");
        }
        if (!p.allFinite()) {
            throw QnetError(K::non_finite, "line " + std::to_string(lineno) + ": non-finite coordinate");
        }
        v.push_back(p);
        if (v.size() > expected) {
            break;
        }
    }
    if (v.size() != expected) {
        throw QnetError(K::count_mismatch, "header declares " + std::to_string(expected) + " vertices, found " +
                                               (v.size() > expected ? "more" : std::to_string(v.size())));
    }
    return QuadNet(rows, cols, std::move(v));
}

QuadNet read_qnet(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    return read_qnet(in);
}

void write_qnet(const QuadNet& net, std::ostream& out) {
    out << "QNET 1\nrows " << net.rows() << " cols " << net.cols() << '\n';
    for (const Vec3& p : net.vertices()) {
        out << fmt17(p[0]) << ' ' << fmt17(p[1]) << ' ' << fmt17(p[2]) << '\n';
    }
}

void write_qnet(const QuadNet& net, const std::string& path) {
    auto out = open_out(path);
    write_qnet(net, out);
    finish(out, path);
}

void export_obj(const QuadNet& net, std::ostream& out) {
    if (net.empty()) {
        throw IoError("cannot export an empty net");
    }
    for (const Vec3& p : net.vertices()) {
        out << "v " << fmt17(p[0]) << ' ' << fmt17(p[1]) << ' ' << fmt17(p[2]) << '\n';
    }
    for (int l = 0; l + 1 < net.cols(); ++l) {
        for (int k = 0; k + 1 < net.rows(); ++k) {
            out << "f " << net.index(k, l) + 1 << ' ' << net.index(k + 1, l) + 1 << ' '
                << net.index(k + 1, l + 1) + 1 << ' ' << net.index(k, l + 1) + 1 << '\n';
        }
    }
}

void export_obj(const QuadNet& net, const std::string& path) {
    auto out = open_out(path);
    export_obj(net, out);
    finish(out, path);
}

void export_obj(const Checkerboard& cbp, std::ostream& out) {
    if (cbp.vertex_count() == 0) {
        throw IoError("cannot export an empty checkerboard");
    }
    for (std::size_t i = 0; i < cbp.vertex_count(); ++i) {
        const Vec3& p = cbp.vertex(i);
        out << "v " << fmt17(p[0]) << ' ' << fmt17(p[1]) << ' ' << fmt17(p[2]) << '\n';
    }
    auto face = [&](const std::array<std::size_t, 4>& ids) {
        out << "f " << ids[0] + 1 << ' ' << ids[1] + 1 << ' ' << ids[2] + 1 << ' ' << ids[3] + 1 << '\n';
    };
    out << "g black\n";
    for (int l = 0; l < cbp.face_cols(); ++l) {
        for (int k = 0; k < cbp.face_rows(); ++k) {
            face(cbp.black_face_ids(k, l));
        }
    }
    out << "g white\n";
    for (int l = 1; l + 1 < cbp.cols(); ++l) {
        for (int k = 1; k + 1 < cbp.rows(); ++k) {
            face(cbp.white_face_ids(k, l));
        }
    }
}

void export_obj(const Checkerboard& cbp, const std::string& path) {
    auto out = open_out(path);
    export_obj(cbp, out);
    finish(out, path);
}

AnalysisReport analyze(const QuadNet& net, const Tolerances& tol, Provenance provenance) {
    tol.validate();
    AnalysisReport r;
    r.tolerances = tol;
    r.provenance = std::move(provenance);
    const Checkerboard cbp = build_checkerboard(net);
    r.classification = classify(cbp, tol);
    if (!r.classification.conjugate) {
        r.koenigs_note = "not conjugate";
    } else {
        try {
            r.koenigs = is_koenigs(cbp, tol);
        } catch (const GeometryError& e) {
            r.koenigs_note = e.what();
        }
    }
    r.isothermic = r.classification.principal && r.koenigs && r.koenigs->is_koenigs;

    if (net.rows() >= 3 && net.cols() >= 3) {
        GaussNet g;
        try {
            g = vertex_normals(net);
        } catch (const GeometryError&) {
            g = GaussNet(net.rows(), net.cols());
        }
        for (int l = 1; l + 2 < net.cols(); ++l) {
            for (int k = 1; k + 2 < net.rows(); ++k) {
                if (!has_curvature(g, {k, l})) {
                    continue;
                }
                try {
                    const ShapeResult s = shape_operator(net, g, {k, l});
                    const MixedAreaCurvatures m = curvatures_via_mixed_area(net, g, {k, l});
                    r.curvature.push_back({{k, l}, s.kappa1, s.kappa2, m.H, m.K, s.dir1, s.dir2});
                } catch (const GeometryError&) {
                }
            }
        }
    }
    return r;
}

namespace {

using nlohmann::json;

json index_json(const GridIndex& g) { return json::array({g.k, g.l}); }

json tolerances_json(const Tolerances& t) {
    return {{"par", t.par}, {"orth", t.orth}, {"plan", t.plan}, {"koenigs", t.koenigs}, {"eq", t.eq}};
}

json provenance_json(const Provenance& p) {
    return {{"input", p.input}, {"command", p.command}, {"version", p.version}};
}

}  // namespace

std::string to_json(const AnalysisReport& r) {
    json j;
    const Classification& c = r.classification;
    json degb = json::array();
    for (const auto& g : c.degenerate_black) {
        degb.push_back(index_json(g));
    }
    json degw = json::array();
    for (const auto& g : c.degenerate_white) {
        degw.push_back(index_json(g));
    }
    j["classification"] = {
        {"orthogonal", c.orthogonal},
        {"conjugate", c.conjugate},
        {"principal", c.principal},
        {"residuals", {{"orthogonality", c.orthogonality_residual}, {"planarity", c.planarity_residual}}},
        {"degenerate_black_faces", degb},
        {"degenerate_white_faces", degw},
    };
    if (r.koenigs) {
        const KoenigsVerdict& v = *r.koenigs;
        json faces = json::array();
        for (const auto& f : v.faces) {
            faces.push_back({{"face", index_json(f.face)},
                             {"conic", f.conic_residual ? json(*f.conic_residual) : json(nullptr)},
                             {"one_form", f.one_form_residual ? json(*f.one_form_residual) : json(nullptr)},
                             {"laplace", f.laplace_residual},
                             {"degenerate", f.degenerate}});
        }
        json deg = json::array();
        for (const auto& g : v.degenerate_faces) {
            deg.push_back(index_json(g));
        }
        j["koenigs"] = {{"flag", v.is_koenigs},
                        {"residuals",
                         {{"conic", v.max_conic_residual},
                          {"one_form", v.max_one_form_residual},
                          {"laplace", v.max_laplace_residual}}},
                        {"degenerate_faces", deg},
                        {"faces", faces}};
    } else {
        j["koenigs"] = {{"flag", false}, {"note", r.koenigs_note}};
    }
    j["isothermic"] = r.isothermic;
    json table = json::array();
    for (const auto& row : r.curvature) {
        table.push_back({{"face", index_json(row.face)},
                         {"kappa1", row.kappa1},
                         {"kappa2", row.kappa2},
                         {"H", row.H},
                         {"K", row.K},
                         {"dir1", {row.dir1[0], row.dir1[1]}},
                         {"dir2", {row.dir2[0], row.dir2[1]}}});
    }
    j["curvature"] = table;
    j["tolerances"] = tolerances_json(r.tolerances);
    j["provenance"] = provenance_json(r.provenance);
    return j.dump(2) + "\n";
}

std::string to_json(const MinimalResult& m, const Provenance& p) {
    json kappa = json::array();
    for (const auto& k : m.kappa) {
        kappa.push_back({k[0], k[1]});
    }
    json j = {
        {"meanCurvatureResidual", m.mean_curvature_residual},
        {"kappaPairs", kappa},
        {"seeds", {m.seeds[0], m.seeds[1]}},
        {"closureResidual", m.closure_residual},
        {"koenigsResidual", m.koenigs_residual},
        {"sphereResidual", m.sphere_residual},
        {"r0sq", m.r0sq},
        {"provenance", provenance_json(p)},
    };
    return j.dump(2) + "\n";
}

}  // namespace cbnet
