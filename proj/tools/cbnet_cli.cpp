#include "cbnet/io.hpp"
#include "cbnet/samples.hpp"
#include "cbnet/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Geometry>

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace {

using namespace cbnet;
using nlohmann::json;

constexpr int exit_ok = 0;
constexpr int exit_io = 1;
constexpr int exit_geometry = 2;

struct TransformArgs {
    std::vector<double> inversion;    // cx cy cz r2
    std::vector<double> rotation;     // ax ay az angle
    double scale = 1.0;
    std::vector<double> translation;  // tx ty tz
    std::optional<std::uint64_t> seed;
};

void add_tolerances(CLI::App* app, Tolerances& tol) {
    app->add_option("--tol-par", tol.par, "parallelism / reconstruction tolerance")->capture_default_str();
    app->add_option("--tol-orth", tol.orth, "orthogonality tolerance")->capture_default_str();
    app->add_option("--tol-plan", tol.plan, "planarity tolerance")->capture_default_str();
    app->add_option("--tol-koenigs", tol.koenigs, "Koenigs and closure tolerance")->capture_default_str();
    app->add_option("--tol-eq", tol.eq, "equality tolerance")->capture_default_str();
}

void add_input(CLI::App* app, std::string& path) {
    app->add_option("input,--input", path, "input QNET file")->required();
}

void add_transform(CLI::App* app, TransformArgs& t) {
    app->add_option("--inversion", t.inversion, "sphere inversion: cx cy cz r2")->expected(4);
    app->add_option("--rotation", t.rotation, "rotation: axis x y z and angle in radians")->expected(4);
    app->add_option("--scale", t.scale, "uniform scaling factor");
    app->add_option("--translation", t.translation, "translation x y z")->expected(3);
    app->add_option("--seed", t.seed, "random transform from this seed, applied after the explicit ones");
}

double mean_edge_sq(const QuadNet& net) {
    double sum = 0.0;
    int n = 0;
    for (int l = 0; l < net.cols(); ++l) {
        for (int k = 0; k < net.rows(); ++k) {
            if (k + 1 < net.rows()) {
                sum += (net(k + 1, l) - net(k, l)).norm();
                ++n;
            }
            if (l + 1 < net.cols()) {
                sum += (net(k, l + 1) - net(k, l)).norm();
                ++n;
            }
        }
    }
    const double m = n > 0 ? sum / n : 0.0;
    return 0.5 * m * m;
}

MoebiusTransform random_transform(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.5, 2.0);
    const Eigen::Quaterniond q = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized();
    const Vec3 center(3.0 * g(rng), 3.0 * g(rng), 3.0 + std::abs(3.0 * g(rng)));
    return MoebiusTransform::translation({g(rng), g(rng), g(rng)}) * MoebiusTransform::scaling(u(rng)) *
           MoebiusTransform::rotation(q.toRotationMatrix()) * MoebiusTransform::sphere_inversion(center, u(rng));
}

MoebiusTransform build_transform(const TransformArgs& t) {
    MoebiusTransform T;
    if (!t.inversion.empty()) {
        T = MoebiusTransform::sphere_inversion({t.inversion[0], t.inversion[1], t.inversion[2]}, t.inversion[3]);
    }
    if (!t.rotation.empty()) {
        const Vec3 axis(t.rotation[0], t.rotation[1], t.rotation[2]);
        if (axis.norm() == 0.0) {
            throw std::invalid_argument("rotation axis must be nonzero");
        }
        T = MoebiusTransform::rotation(Eigen::AngleAxisd(t.rotation[3], axis.normalized()).toRotationMatrix()) * T;
    }
    if (t.scale != 1.0) {
        T = MoebiusTransform::scaling(t.scale) * T;
    }
    if (!t.translation.empty()) {
        T = MoebiusTransform::translation({t.translation[0], t.translation[1], t.translation[2]}) * T;
    }
    if (t.seed) {
        T = random_transform(*t.seed) * T;
    }
    return T;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("write to " + path + " failed");
    }
}

json index_json(const GridIndex& g) { return json::array({g.k, g.l}); }

json koenigs_json(const KoenigsVerdict& v) {
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
    return {{"flag", v.is_koenigs},
            {"residuals",
             {{"conic", v.max_conic_residual},
              {"one_form", v.max_one_form_residual},
              {"laplace", v.max_laplace_residual}}},
            {"degenerate_faces", deg},
            {"faces", faces}};
}

json curvature_json(const QuadNet& net) {
    const GaussNet g = vertex_normals(net);
    json rows = json::array();
    for (int l = 0; l + 1 < net.cols(); ++l) {
        for (int k = 0; k + 1 < net.rows(); ++k) {
            if (!has_curvature(g, {k, l})) {
                continue;
            }
            const ShapeResult s = shape_operator(net, g, {k, l});
            const MixedAreaCurvatures m = curvatures_via_mixed_area(net, g, {k, l});
            rows.push_back({{"face", index_json({k, l})},
                            {"kappa1", s.kappa1},
                            {"kappa2", s.kappa2},
                            {"H", m.H},
                            {"K", m.K},
                            {"dir1", {s.dir1[0], s.dir1[1]}},
                            {"dir2", {s.dir2[0], s.dir2[1]}}});
        }
    }
    return rows;
}

json congruence_json(const SphereCongruence& c, double r0sq) {
    json members = json::array();
    for (int l = 0; l < c.cols(); ++l) {
        for (int k = 0; k < c.rows(); ++k) {
            const Sphere& s = c(k, l).as_sphere();
            members.push_back({{"vertex", index_json({k, l})},
                               {"center", {s.center[0], s.center[1], s.center[2]}},
                               {"r2", s.r2}});
        }
    }
    return {{"r0sq", r0sq}, {"max_residual", c.max_adjacent_residual()}, {"spheres", members}};
}

std::string command_line(int argc, char** argv) {
    std::ostringstream s;
    for (int i = 0; i < argc; ++i) {
        s << (i ? " " : "") << argv[i];
    }
    return s.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"checkerboard pattern nets: classification, Koenigs tests, dualization, minimal surfaces"};
    app.set_version_flag("--version", std::string(cbnet::version));
    app.require_subcommand(1);

    Tolerances tol;
    std::string input;
    std::string out;
    TransformArgs targs;
    std::optional<double> r0sq;
    double alpha0 = 1.0;
    double alpha1 = 1.0;
    std::string orientation = "reversing";
    std::optional<double> alpha0_opt;
    std::optional<double> alpha1_opt;
    std::string report;
    std::string obj;

    std::string kind_name;
    SampleSpec spec;
    std::string mode = "exact";
    auto* gen = app.add_subcommand("generate", "write a sample net");
    gen->add_option("kind", kind_name, "square_grid, paraboloid, sphere_graticule, cylinder, enneper_gauss, catenoid_gauss")
        ->required();
    gen->add_option("--eps", spec.eps, "parameter step")->capture_default_str();
    gen->add_option("--rows", spec.rows, "vertices along k")->capture_default_str();
    gen->add_option("--cols", spec.cols, "vertices along l")->capture_default_str();
    gen->add_option("--k0", spec.k0, "index offset along k")->capture_default_str();
    gen->add_option("--l0", spec.l0, "index offset along l")->capture_default_str();
    gen->add_option("--xi", spec.xi, "lattice offset along k (Gauss kinds)")->capture_default_str();
    gen->add_option("--eta", spec.eta, "lattice offset along l (Gauss kinds)")->capture_default_str();
    gen->add_option("--radius", spec.radius, "sphere or cylinder radius")->capture_default_str();
    gen->add_option("--shift", spec.shift, "catenoid lattice shift")->capture_default_str();
    gen->add_option("--mode", mode, "Gauss sampling: exact or pointwise")
        ->check(CLI::IsMember({"exact", "pointwise"}))
        ->capture_default_str();
    gen->add_option("--out", out, "output QNET file")->required();

    auto* cbp = app.add_subcommand("cbp", "export the checkerboard pattern as OBJ");
    add_input(cbp, input);
    cbp->add_option("--out", out, "output OBJ file")->required();
    cbp->add_option("--control", obj, "also export the control net as OBJ");

    auto* ana = app.add_subcommand("analyze", "classification, Koenigs verdict and curvature report");
    add_input(ana, input);
    add_tolerances(ana, tol);
    ana->add_option("--out", out, "report file (default stdout)");

    auto* curv = app.add_subcommand("curvature", "per-face shape operator and mixed-area curvatures");
    add_input(curv, input);
    curv->add_option("--out", out, "table file (default stdout)");

    auto* cong = app.add_subcommand("congruence", "Möbius representation as orthogonal spheres");
    add_input(cong, input);
    add_tolerances(cong, tol);
    cong->add_option("--r0sq", r0sq, "squared radius at (0,0) (default half the squared mean edge length)");
    cong->add_option("--out", out, "output file (default stdout)");

    auto* moeb = app.add_subcommand("moebius", "apply a Möbius transformation to the Möbius representation");
    add_input(moeb, input);
    add_tolerances(moeb, tol);
    add_transform(moeb, targs);
    moeb->add_option("--r0sq", r0sq, "squared radius at (0,0) (default half the squared mean edge length)");
    moeb->add_option("--out", out, "output QNET file")->required();

    auto* koen = app.add_subcommand("koenigs", "Koenigs verdict of the checkerboard pattern");
    add_input(koen, input);
    add_tolerances(koen, tol);
    koen->add_option("--out", out, "output file (default stdout)");

    auto* dual = app.add_subcommand("dualize", "dual checkerboard pattern and its smoothest control net");
    add_input(dual, input);
    add_tolerances(dual, tol);
    dual->add_option("--alpha0", alpha0, "scale of black face (0,0)")->capture_default_str();
    dual->add_option("--alpha1", alpha1, "scale of black face (1,0)")->capture_default_str();
    dual->add_option("--orientation", orientation, "reversing or preserving")
        ->check(CLI::IsMember({"reversing", "preserving"}))
        ->capture_default_str();
    dual->add_option("--out", out, "output QNET file")->required();
    dual->add_option("--obj", obj, "also export the dual checkerboard as OBJ");

    auto add_minimal_args = [&](CLI::App* sub) {
        add_input(sub, input);
        add_tolerances(sub, tol);
        sub->add_option("--alpha0", alpha0_opt, "dual seed at face (0,0) (default: smoothest)");
        sub->add_option("--alpha1", alpha1_opt, "dual seed at face (1,0)");
        sub->add_option("--out", out, "output QNET surface")->required();
        sub->add_option("--report", report, "report file (default stdout)");
    };
    auto* mini = app.add_subcommand("minimal", "minimal surface from an isothermic Gauss net");
    add_minimal_args(mini);
    auto* gour = app.add_subcommand("goursat", "minimal surface from a Möbius-transformed Gauss net");
    add_minimal_args(gour);
    add_transform(gour, targs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_io;
    }

    const Provenance prov{input, command_line(argc, argv), cbnet::version};
    try {
        tol.validate();
        if (*gen) {
            const auto kind = parse_sample_kind(kind_name);
            if (!kind) {
                throw std::invalid_argument("unknown sample kind " + kind_name);
            }
            spec.kind = *kind;
            spec.mode = mode == "pointwise" ? GaussMode::pointwise : GaussMode::exact;
            write_qnet(generate(spec), out);
        } else if (*cbp) {
            const QuadNet net = read_qnet(input);
            export_obj(build_checkerboard(net), out);
            if (!obj.empty()) {
                export_obj(net, obj);
            }
        } else if (*ana) {
            emit(to_json(analyze(read_qnet(input), tol, prov)), out);
        } else if (*curv) {
            emit(curvature_json(read_qnet(input)).dump(2) + "\n", out);
        } else if (*cong) {
            const QuadNet net = read_qnet(input);
            const double r = r0sq.value_or(mean_edge_sq(net));
            emit(congruence_json(build_congruence(net, r, tol.orth), r).dump(2) + "\n", out);
        } else if (*moeb) {
            const QuadNet net = read_qnet(input);
            const SphereCongruence c = build_congruence(net, r0sq.value_or(mean_edge_sq(net)), tol.orth);
            write_qnet(apply_moebius(build_transform(targs), c).net, out);
        } else if (*koen) {
            const KoenigsVerdict v = is_koenigs(build_checkerboard(read_qnet(input)), tol);
            emit(koenigs_json(v).dump(2) + "\n", out);
        } else if (*dual) {
            const Orientation o = orientation == "preserving" ? Orientation::preserving : Orientation::reversing;
            const DualizationResult d = dualize(build_checkerboard(read_qnet(input)), alpha0, alpha1, o, tol.koenigs);
            write_qnet(reconstruct_control_smooth(d.dual, tol.par), out);
            if (!obj.empty()) {
                export_obj(d.dual, obj);
            }
            std::cerr << "closure residual " << d.closure_residual << '\n';
        } else if (*mini || *gour) {
            if (alpha0_opt.has_value() != alpha1_opt.has_value()) {
                throw std::invalid_argument("--alpha0 and --alpha1 go together");
            }
            std::optional<std::array<double, 2>> seeds;
            if (alpha0_opt) {
                seeds = std::array<double, 2>{*alpha0_opt, *alpha1_opt};
            }
            const QuadNet gauss = read_qnet(input);
            MinimalResult m = minimal_from_gauss(gauss, seeds, tol);
            if (*gour) {
                m = goursat(m, build_transform(targs), seeds, tol);
            }
            write_qnet(m.surface, out);
            emit(to_json(m, prov), report);
        }
    } catch (const GeometryError& e) {
        std::cerr << "error: " << e.what();
        if (e.residual()) {
            std::cerr << " (residual " << *e.residual() << ")";
        }
        if (e.where()) {
            std::cerr << " at " << to_string(*e.where());
        }
        std::cerr << '\n';
        return exit_geometry;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    }
    return exit_ok;
}
