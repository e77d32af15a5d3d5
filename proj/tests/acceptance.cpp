#include "cbnet/io.hpp"
#include "cbnet/samples.hpp"

#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <Eigen/Geometry>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

using namespace cbnet;
using namespace cbtest;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [" << what << "]";
        }
    }
};

std::string sci(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", x);
    return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool ratio_ok(double r) { return r >= 4.0 * 0.7 && r <= 4.0 * 1.3; }

// 1 ---------------------------------------------------------------------------

double curvature_error(const std::function<Vec3(double, double)>& phi, bool sphere, double eps) {
    const double x0 = 0.3;
    const double y0 = 0.2;
    QuadNet net(4, 4);
    for (int l = 0; l < 4; ++l) {
        for (int k = 0; k < 4; ++k) {
            net(k, l) = phi(x0 + eps * (k - 1.5), y0 + eps * (l - 1.5));
        }
    }
    const GaussNet g = vertex_normals(net);
    const ShapeResult s = shape_operator(net, g, {1, 1});
    const Vec3 p = net(1, 1);
    const Vec3 radial = sphere ? p : Vec3(p[0], p[1], 0.0);
    const double sigma = g(1, 1).dot(radial) > 0.0 ? 1.0 : -1.0;
    double e1 = sigma;
    double e2 = sphere ? sigma : 0.0;
    if (e1 < e2) {
        std::swap(e1, e2);
    }
    return std::max(std::abs(s.kappa1 - e1), std::abs(s.kappa2 - e2));
}

Outcome criterion_curvature() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const double eps[3] = {0.1, 0.05, 0.025};
    const std::pair<const char*, std::function<Vec3(double, double)>> samples[2] = {
        {"sphere", stereographic_sphere}, {"cylinder", skew_cylinder}};
    for (int i = 0; i < 2; ++i) {
        double e[3];
        for (int j = 0; j < 3; ++j) {
            e[j] = curvature_error(samples[i].second, i == 0, eps[j]);
        }
        const double r1 = e[0] / e[1];
        const double r2 = e[1] / e[2];
        o.detail << " " << samples[i].first << " err " << sci(e[0]) << "/" << sci(e[1]) << "/" << sci(e[2])
                 << " ratios " << sci(r1) << "," << sci(r2);
        o.require(ratio_ok(r1) && ratio_ok(r2), std::string(samples[i].first) + " ratio");
        o.require(e[2] <= 0.01, std::string(samples[i].first) + " abs error");
    }
    const double t = seconds_since(t0);
    o.detail << " time " << sci(t) << "s";
    o.require(t < 1.0, "runtime");
    return o;
}

// 2 ---------------------------------------------------------------------------

Outcome criterion_steiner() {
    Outcome o;
    Rng rng(2);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const QuadNet net = random_conjugate_net(rng, 4, 4);
        const GaussNet g = vertex_normals(net);
        for (double t : {-0.5, 0.3, 1.0}) {
            worst = std::max(worst, steiner_residual(net, g, {1, 1}, t));
        }
    }
    o.detail << " max residual " << sci(worst) << " over 300 cases";
    o.require(worst <= 1e-10, "residual");
    return o;
}

// 3 ---------------------------------------------------------------------------

Outcome criterion_mixed_area() {
    Outcome o;
    Rng rng(3);
    double wA = 0.0, wH = 0.0, wK = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const QuadNet net = random_conjugate_net(rng, 4, 4, 0.35);
        const GaussNet g = vertex_normals(net);
        const ShapeResult s = shape_operator(net, g, {1, 1});
        const MixedAreaCurvatures m = curvatures_via_mixed_area(net, g, {1, 1});
        const double scale = s.sigma.norm();
        wA = std::max(wA, std::abs(m.det_I - m.area * m.area) / (m.area * m.area));
        wH = std::max(wH, std::abs(0.5 * s.sigma.trace() - m.H) / scale);
        wK = std::max(wK, std::abs(s.sigma.determinant() - m.K) / (scale * scale));
    }
    o.detail << " det(I)=A^2 " << sci(wA) << ", H " << sci(wH) << ", K " << sci(wK) << " over 1000 faces";
    o.require(wA <= 1e-9 && wH <= 1e-9 && wK <= 1e-9, "relative gap");
    return o;
}

// 4 ---------------------------------------------------------------------------

double half_mean_edge_sq(const QuadNet& net) {
    double sum = 0.0;
    int n = 0;
    for (int l = 0; l + 1 < net.cols(); ++l) {
        for (int k = 0; k + 1 < net.rows(); ++k) {
            sum += (net(k + 1, l) - net(k, l)).norm() + (net(k, l + 1) - net(k, l)).norm();
            n += 2;
        }
    }
    return 0.5 * (sum / n) * (sum / n);
}

double euclid_pair_residual(const Sphere& a, const Sphere& b) {
    const double d2 = (a.center - b.center).squaredNorm();
    return std::abs(d2 - a.r2 - b.r2) / (d2 + std::abs(a.r2) + std::abs(b.r2));
}

Outcome criterion_congruence() {
    Outcome o;
    Rng rng(4);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const QuadNet net = random_orthogonal_net(rng, 5, 5);
        const SphereCongruence c = build_congruence(net, half_mean_edge_sq(net));
        for (int l = 0; l < 5; ++l) {
            for (int k = 0; k < 5; ++k) {
                const Sphere& s = c(k, l).as_sphere();
                if (k + 1 < 5) worst = std::max(worst, euclid_pair_residual(s, c(k + 1, l).as_sphere()));
                if (l + 1 < 5) worst = std::max(worst, euclid_pair_residual(s, c(k, l + 1).as_sphere()));
            }
        }
    }
    int rejected = 0;
    for (int i = 0; i < 100; ++i) {
        const QuadNet net = random_net(rng, 5, 5);
        try {
            build_congruence(net, half_mean_edge_sq(net));
        } catch (const GeometryError&) {
            ++rejected;
        }
    }
    double agree = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 c1 = gaussian_vec(rng);
        const double r1 = uniform(rng, -1.0, 2.0);
        const Vec3 c2 = gaussian_vec(rng);
        const double r2 = i % 2 ? uniform(rng, -1.0, 2.0) : (c1 - c2).squaredNorm() - r1;
        const OrthogonalityCheck chk = orthogonal(SphereOrPlane::sphere(c1, r1), SphereOrPlane::sphere(c2, r2));
        agree = std::max(agree, std::abs(*chk.euclidean_residual - *chk.lifted_euclidean_residual));
    }
    o.detail << " orthogonal nets residual " << sci(worst) << ", non-orthogonal rejected " << rejected
             << "/100, lifted vs Euclidean gap " << sci(agree);
    o.require(worst <= 1e-9, "residual");
    o.require(rejected == 100, "rejection");
    o.require(agree <= 1e-12, "agreement");
    return o;
}

// 5 ---------------------------------------------------------------------------

Outcome criterion_moebius() {
    Outcome o;
    Rng rng(5);
    double worst = 0.0;
    int principal = 0;
    double group = 0.0;
    for (int i = 0; i < 50; ++i) {
        const QuadNet net = random_revolution_net(rng, 6, 6);
        const SphereCongruence c = build_congruence(net, half_mean_edge_sq(net));
        for (int j = 0; j < 10; ++j) {
            const MoebiusTransform T = random_moebius(rng);
            const QuadNet img = apply_moebius(T, c).net;
            const Classification cl = classify(build_checkerboard(img));
            principal += cl.principal ? 1 : 0;
            worst = std::max({worst, cl.orthogonality_residual, cl.planarity_residual});
            if (j == 0) {
                const MoebiusTransform U = random_moebius(rng);
                const QuadNet two = apply_moebius(U, apply_moebius(T, c).congruence).net;
                const QuadNet one = apply_moebius(U * T, c).net;
                double d = 0.0;
                for (std::size_t v = 0; v < one.size(); ++v) {
                    d = std::max(d, (one.vertices()[v] - two.vertices()[v]).norm());
                }
                group = std::max(group, d / one.diameter());
            }
        }
    }
    o.detail << " principal " << principal << "/500, max residual " << sci(worst) << ", composition gap "
             << sci(group);
    o.require(principal == 500 && worst <= 1e-8, "principality");
    o.require(group <= 1e-10, "group law");
    return o;
}

// 6 ---------------------------------------------------------------------------

struct FaceVotes {
    bool conic, one_form, laplace, sine, dual;
};

FaceVotes face_votes(const QuadNet& net, const Checkerboard& cbp, GridIndex f, double tol) {
    FaceVotes v{};
    v.conic = koenigs_conic_residual(six_points(cbp, f)) <= tol;
    v.one_form = std::abs(one_form_closure_black(cbp, f) - 1.0) <= tol;
    const LaplaceInvariants li = laplace_invariants(net, f);
    v.laplace = std::abs(li.inv1 - li.inv2) / std::max(std::abs(li.inv1), std::abs(li.inv2)) <= tol;
    v.sine = std::abs(sine_ratio_product(cbp, f) - 1.0) <= tol;
    QuadNet window(4, 4);
    for (int l = 0; l < 4; ++l) {
        for (int k = 0; k < 4; ++k) {
            window(k, l) = net(f.k - 1 + k, f.l - 1 + l);
        }
    }
    v.dual = dualize_unchecked(build_checkerboard(window), 1.0, 1.0, Orientation::reversing).closure_residual <= tol;
    return v;
}

Outcome criterion_koenigs() {
    Outcome o;
    Rng rng(6);
    const double tol = 1e-8;
    int faces = 0, agree = 0, koenigs_faces = 0, degenerate = 0;
    for (int i = 0; i < 200; ++i) {
        QuadNet net = random_koenigs_net(rng, 6, 6);
        if (i >= 100) {
            net = perturb_planar(rng, net, 1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 4), 0.01);
        }
        const Checkerboard cbp = build_checkerboard(net);
        for (int l = 1; l <= 3; ++l) {
            for (int k = 1; k <= 3; ++k) {
                if (six_points(cbp, {k, l}).degenerate) {
                    ++degenerate;
                    continue;
                }
                const FaceVotes v = face_votes(net, cbp, {k, l}, tol);
                ++faces;
                const bool all = v.conic && v.one_form && v.laplace && v.sine && v.dual;
                const bool none = !v.conic && !v.one_form && !v.laplace && !v.sine && !v.dual;
                agree += (all || none) ? 1 : 0;
                koenigs_faces += v.laplace ? 1 : 0;
            }
        }
    }
    o.detail << " agreement " << agree << "/" << faces << " faces (" << koenigs_faces << " Koenigs, " << degenerate
             << " degenerate skipped)";
    o.require(agree == faces, "verdict agreement");

    const Checkerboard yes = build_checkerboard(appendix_net(2, 3, 2, 3));
    const Checkerboard no = build_checkerboard(appendix_net(2, 3, 2, 4));
    const double det_yes = appendix_determinant(2, 3, 2, 3);
    const double det_no = appendix_determinant(2, 3, 2, 4);
    const double cy = koenigs_conic_residual(six_points(yes, {1, 1}));
    const double cn = koenigs_conic_residual(six_points(no, {1, 1}));
    const double qy = one_form_closure_black(yes, {1, 1});
    const double qn = one_form_closure_black(no, {1, 1});
    o.detail << "; appendix det " << det_yes << "/" << det_no << ", conic " << sci(cy) << "/" << sci(cn)
             << ", closure " << qy << "/" << qn;
    o.require(det_yes == 0.0 && det_no != 0.0, "closed form");
    o.require(cy <= 1e-12 && cn > 1e-3, "appendix conic");
    o.require(std::abs(qy - 1.0) <= 1e-12 && std::abs(qn - 1.125) <= 1e-12, "appendix closure");
    return o;
}

// 7 ---------------------------------------------------------------------------

Outcome criterion_menelaus() {
    Outcome o;
    Rng rng(7);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Checkerboard cbp = build_checkerboard(random_conjugate_net(rng, 6, 6));
        for (int l = 1; l <= 4; ++l) {
            for (int k = 1; k <= 4; ++k) {
                worst = std::max(worst, std::abs(one_form_closure_white(cbp, {k, l}) - 1.0));
            }
        }
    }
    o.detail << " max |prod q - 1| " << sci(worst) << " over 1600 white faces";
    o.require(worst <= 1e-10, "closure");
    return o;
}

// 8 ---------------------------------------------------------------------------

QuadNet cbp_points(const Checkerboard& c) {
    std::vector<Vec3> v;
    for (std::size_t i = 0; i < c.vertex_count(); ++i) {
        v.push_back(c.vertex(i));
    }
    const int n = static_cast<int>(v.size());
    return QuadNet(n, 1, std::move(v));
}

Outcome criterion_involution() {
    Outcome o;
    Rng rng(8);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Checkerboard cbp = build_checkerboard(random_moebius_grid(rng, 6, 6));
        const DualizationResult d1 = dualize(cbp, 1.0, 1.0);
        const DualizationResult d2 = dualize(d1.dual, 1.0 / d1.scales[0], 1.0 / d1.scales[1]);
        worst = std::max(worst, align_similarity(cbp_points(d2.dual), cbp_points(cbp)).relative_rms);
    }
    o.detail << " max relative RMS " << sci(worst) << " over 50 nets";
    o.require(worst <= 1e-8, "RMS");
    return o;
}

// 9 ---------------------------------------------------------------------------

Outcome criterion_isothermic() {
    Outcome o;
    Rng rng(9);
    int iso = 0, dual_iso = 0;
    double w = 0.0, wd = 0.0;
    Tolerances loose;
    loose.par = loose.orth = loose.plan = loose.koenigs = 1e-7;
    for (int i = 0; i < 50; ++i) {
        const Checkerboard cbp = build_checkerboard(random_moebius_grid(rng, 6, 6));
        const IsothermicVerdict v = is_isothermic(cbp);
        iso += v.is_isothermic ? 1 : 0;
        w = std::max({w, v.principal.orthogonality_residual, v.principal.planarity_residual,
                      v.koenigs.max_laplace_residual});
        const auto seeds = smooth_dual_seed(cbp);
        const IsothermicVerdict vd = is_isothermic(dualize(cbp, seeds[0], seeds[1]).dual, loose);
        dual_iso += vd.is_isothermic ? 1 : 0;
        wd = std::max({wd, vd.principal.orthogonality_residual, vd.principal.planarity_residual,
                       vd.koenigs.max_laplace_residual});
    }
    o.detail << " isothermic " << iso << "/50 (max residual " << sci(w) << "), duals " << dual_iso
             << "/50 (max residual " << sci(wd) << ")";
    o.require(iso == 50 && w <= 1e-8, "nets");
    o.require(dual_iso == 50 && wd <= 1e-7, "duals");
    return o;
}

// 10 --------------------------------------------------------------------------

struct MinimalRun {
    double rms;
    double mean_residual;
};

MinimalRun minimal_run(SampleKind kind, double eps) {
    SampleSpec spec;
    spec.kind = kind;
    spec.eps = eps;
    spec.rows = spec.cols = static_cast<int>(std::lround(1.0 / eps)) + 1;
    spec.k0 = spec.l0 = -0.5 * (spec.rows - 1);
    spec.xi = 0.3;
    spec.eta = 0.2;
    spec.shift = 1.0;
    const MinimalResult m = minimal_from_gauss(generate(spec));
    QuadNet exact(spec.rows, spec.cols);
    const std::complex<double> rot = std::polar(1.0, std::acos(-1.0) / 4.0);
    for (int l = 0; l < spec.cols; ++l) {
        for (int k = 0; k < spec.rows; ++k) {
            const std::complex<double> w = eps * rot * std::complex<double>(k + spec.k0 + spec.xi, l + spec.l0 + spec.eta);
            exact(k, l) = kind == SampleKind::enneper_gauss ? enneper(w) : catenoid(w + spec.shift);
        }
    }
    return {align_similarity(m.surface, exact).relative_rms, m.mean_curvature_residual};
}

Outcome criterion_minimal() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    for (SampleKind kind : {SampleKind::enneper_gauss, SampleKind::catenoid_gauss}) {
        MinimalRun r[3];
        const double eps[3] = {0.1, 0.05, 0.025};
        for (int j = 0; j < 3; ++j) {
            r[j] = minimal_run(kind, eps[j]);
        }
        const double r1 = r[0].rms / r[1].rms;
        const double r2 = r[1].rms / r[2].rms;
        const std::string name = kind == SampleKind::enneper_gauss ? "enneper" : "catenoid";
        o.detail << " " << name << " rms " << sci(r[0].rms) << "/" << sci(r[1].rms) << "/" << sci(r[2].rms)
                 << " ratios " << sci(r1) << "," << sci(r2) << " |k1+k2| " << sci(r[2].mean_residual) << ";";
        o.require(ratio_ok(r1) && ratio_ok(r2), name + " ratio");
        o.require(r[2].mean_residual <= 1e-2, name + " mean curvature");
    }
    const double t = seconds_since(t0);
    o.detail << " time " << sci(t) << "s";
    o.require(t < 5.0, "runtime");
    return o;
}

// 11 --------------------------------------------------------------------------

Outcome criterion_goursat() {
    Outcome o;
    SampleSpec spec;
    spec.kind = SampleKind::enneper_gauss;
    spec.eps = 0.1;
    spec.rows = spec.cols = 11;
    spec.k0 = spec.l0 = -5.0;
    spec.xi = 0.3;
    spec.eta = 0.2;
    const MinimalResult base = minimal_from_gauss(generate(spec));
    Rng rng(11);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        const Mat3 R = random_rotation(rng);
        const MinimalResult g = goursat(base, MoebiusTransform::rotation(R));
        const QuadNet rotated = rigid_motion(base.surface, R, Vec3::Zero());
        worst = std::max(worst, align_similarity(g.surface, rotated, false).relative_rms);
    }
    o.detail << " max relative RMS " << sci(worst) << " over 5 rotations";
    o.require(worst <= 1e-8, "RMS");
    return o;
}

// 12 --------------------------------------------------------------------------

int run(const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome criterion_cli() {
    Outcome o;
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("cbnet_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string cli = CBNET_CLI_PATH;
    auto p = [&](const char* name) { return (dir / name).string(); };

    int rc = run(cli + " generate square_grid --eps 1 --rows 5 --cols 5 --out " + p("g.qnet"));
    o.require(rc == 0, "generate exit " + std::to_string(rc));
    rc = run(cli + " analyze " + p("g.qnet") + " --out " + p("a.json"));
    o.require(rc == 0, "analyze exit " + std::to_string(rc));
    rc = run(cli + " dualize " + p("g.qnet") + " --out " + p("d.qnet"));
    o.require(rc == 0, "dualize exit " + std::to_string(rc));
    rc = run(cli + " analyze " + p("d.qnet") + " --out " + p("b.json"));
    o.require(rc == 0, "second analyze exit " + std::to_string(rc));
    try {
        for (const char* f : {"a.json", "b.json"}) {
            const auto j = nlohmann::json::parse(slurp(dir / f));
            const bool ok = j["classification"]["principal"] && j["koenigs"]["flag"] && j["isothermic"];
            o.require(ok, std::string(f) + " verdicts");
            const QuadNet net = read_qnet(p(f[0] == 'a' ? "g.qnet" : "d.qnet"));
            const AnalysisReport lib = analyze(net);
            o.require(j["classification"]["orthogonal"] == lib.classification.orthogonal &&
                          j["classification"]["residuals"]["orthogonality"] == lib.classification.orthogonality_residual &&
                          j["koenigs"]["residuals"]["laplace"] == lib.koenigs->max_laplace_residual,
                      std::string(f) + " differs from library");
        }
    } catch (const std::exception& e) {
        o.require(false, std::string("report: ") + e.what());
    }

    QuadNet bent(5, 5);
    for (int l = 0; l < 5; ++l) {
        for (int k = 0; k < 5; ++k) {
            bent(k, l) = {double(k), double(l), 0.0};
        }
    }
    bent(2, 2) += Vec3(0.13, 0.07, 0.0);
    write_qnet(bent, p("bent.qnet"));
    const int status = std::system((cli + " dualize " + p("bent.qnet") + " --out " + p("x.qnet") + " 2>" +
                                    p("err.txt") + " >/dev/null").c_str());
    const int bent_rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.require(bent_rc == 2 && slurp(dir / "err.txt").find("residual") != std::string::npos,
              "non-Koenigs dualize exit " + std::to_string(bent_rc));

    std::ofstream(p("count.qnet")) << "QNET 1\nrows 2 cols 2\n0 0 0\n1 0 0\n0 1 0\n";
    std::ofstream(p("nan.qnet")) << "QNET 1\nrows 1 cols 1\nnan 0 0\n";
    std::ofstream(p("header.qnet")) << "QNET 2\nrows 1 cols 1\n0 0 0\n";
    int bad = 0;
    for (const char* f : {"count.qnet", "nan.qnet", "header.qnet", "missing.qnet"}) {
        bad += run(cli + " analyze " + p(f)) == 1 ? 1 : 0;
    }
    bad += run(cli + " analyze " + p("g.qnet") + " --no-such-flag") == 1 ? 1 : 0;
    bad += run(cli + " frobnicate") == 1 ? 1 : 0;
    o.require(bad == 6, "malformed inputs " + std::to_string(bad) + "/6");
    o.detail << " pipeline exit codes 0, non-Koenigs dualize exit " << bent_rc << ", malformed inputs exit 1: " << bad
             << "/6";
    fs::remove_all(dir);
    return o;
}

}  // namespace

int main() {
    const std::pair<const char*, Outcome (*)()> criteria[] = {
        {"curvature consistency", criterion_curvature},
        {"Steiner formula", criterion_steiner},
        {"mixed-area identities", criterion_mixed_area},
        {"sphere congruences", criterion_congruence},
        {"Möbius invariance of principality", criterion_moebius},
        {"Koenigs equivalence", criterion_koenigs},
        {"Menelaus closure", criterion_menelaus},
        {"dual involution", criterion_involution},
        {"isothermic invariance", criterion_isothermic},
        {"minimal surfaces", criterion_minimal},
        {"Goursat rotation", criterion_goursat},
        {"CLI pipeline", criterion_cli},
    };
    int failed = 0;
    int n = 0;
    for (const auto& [name, fn] : criteria) {
        ++n;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << n << " " << name << ":" << o.detail.str() << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
