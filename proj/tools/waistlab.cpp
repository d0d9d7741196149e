#include <chrono>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "waistlab/content.hpp"
#include "waistlab/convex.hpp"
#include "waistlab/errors.hpp"
#include "waistlab/fibrations.hpp"
#include "waistlab/filling.hpp"
#include "waistlab/integral_geometry.hpp"
#include "waistlab/isoperimetry.hpp"
#include "waistlab/mesh.hpp"
#include "waistlab/report.hpp"
#include "waistlab/rng.hpp"
#include "waistlab/suite.hpp"
#include "waistlab/sweepout.hpp"
#include "waistlab/transport.hpp"

using namespace waistlab;

namespace {

constexpr double kPi = std::numbers::pi;

int default_workers() {
    if (const char* env = std::getenv("WAISTLAB_WORKERS")) {
        try {
            int w = std::stoi(env);
            if (w >= 1) return w;
        } catch (const std::exception&) {
        }
        throw UsageError("WAISTLAB_WORKERS must be a positive integer");
    }
    return 1;
}

struct Common {
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;
    std::string csv;
};

// Each subcommand owns its options, so INI sections for other subcommands cannot leak in.
Common& add_common(CLI::App* app, std::deque<Common>& pool, const Common& defaults, bool stochastic = true) {
    Common& c = pool.emplace_back(defaults);
    if (stochastic) app->add_option("--seed", c.seed, "random seed")->capture_default_str();
    app->add_option("--workers", c.workers, "worker threads (default: WAISTLAB_WORKERS or 1)")->check(CLI::PositiveNumber);
    app->add_option("--out", c.out, "write the JSON report here instead of stdout");
    app->add_option("--csv", c.csv, "write per-row CSV here");
    return c;
}

nlohmann::ordered_json vec_json(const Vec& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

void with_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write '" + path + "'");
    body(f);
}

const auto g_start = std::chrono::steady_clock::now();

int emit(ReportDocument doc, const Common& c) {
    if (!doc.timing.contains("wall_seconds"))
        doc.timing["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - g_start).count();
    const std::string text = doc.to_json().dump(2) + "\n";
    if (c.out.empty()) {
        std::cout << text;
    } else {
        with_file(c.out, [&](std::ostream& o) { o << text; });
    }
    for (const auto& f : doc.failures()) std::cerr << "FAIL " << f << "\n";
    return doc.passed() ? 0 : 1;
}

Record info_record(std::string id, std::string criterion, std::string bound_ref) {
    Record r = make_record(std::move(id), std::move(criterion), std::move(bound_ref), true);
    r.verdict = Verdict::Info;
    return r;
}

// ---- waist -----------------------------------------------------------------

struct WaistArgs {
    std::string map = "hopf3";
    std::string bound;
    std::vector<double> lattice{1.0, 2.0, 3.0};
    int keep = 1;
    int n = 3, k = 1;
    int resolution = 6;
    std::int64_t samples = 40000;
    std::vector<double> schedule{0.05, 0.1, 0.2};
    int points = 33;
};

bool is_sphere_map(const std::string& m) { return m == "hopf3" || m == "hopf7" || m == "hopf15"; }

FiberMap make_map(const WaistArgs& a) {
    const std::string& m = a.map;
    if (m == "hopf3") return FiberMap::hopf_3_2();
    if (m == "hopf7") return FiberMap::hopf_7_4();
    if (m == "hopf15") return FiberMap::hopf_15_8();
    if (m == "rp3-hopf") return FiberMap::rp_quotient(FiberMap::hopf_3_2());
    if (m == "rp7-hopf") return FiberMap::rp_quotient(FiberMap::hopf_7_4());
    if (m == "cp3-hopf") return FiberMap::cp_quotient(FiberMap::hopf_7_4());
    if (m == "absz1-s3") return FiberMap::abs_z1_on_s3();
    if (m == "absz1-rp3") return FiberMap::abs_z1_on_rp3();
    if (m == "x1sq-rp2") return FiberMap::x1_squared_on_rp2();
    if (m == "torus") return FiberMap::torus_projection(a.lattice, a.keep);
    if (m == "linear") {
        if (a.k < 1 || a.k > a.n) throw UsageError("linear map needs 1 <= k <= n");
        Mat rows = Mat::Zero(a.k, a.n + 1);
        for (int i = 0; i < a.k; ++i) rows(i, i) = 1.0;
        return FiberMap::linear_projection(a.n, rows);
    }
    throw UsageError("unknown map '" + m + "'");
}

std::string default_bound(const FiberMap& map) {
    switch (map.kind()) {
        case FiberKind::LinearProjection:
        case FiberKind::Hopf: return "sphere-equator";
        case FiberKind::RpQuotient: return "rpn-volume";
        case FiberKind::CpQuotient: return "cpn-nu-t";
        case FiberKind::AbsZ1OnS3: return "sphere-equator";
        case FiberKind::AbsZ1OnRP3: return "rp3-pi2";
        case FiberKind::X1SquaredOnRP2: return "x1sq-2pi";
        case FiberKind::TorusProjection: return "torus-product";
    }
    return "sphere-equator";
}

int run_waist_verify(const WaistArgs& a, const Common& c) {
    FiberMap map = make_map(a);
    std::string bound = a.bound.empty() ? default_bound(map) : a.bound;
    const bool rp_bound = bound == "even-map-pi" || bound == "rp3-pi2" || bound.rfind("rpn-", 0) == 0;
    bool descended = false;
    if (rp_bound && is_sphere_map(a.map)) {
        map = FiberMap::rp_quotient(map);
        descended = true;
    }
    VerifyOptions opt;
    opt.t_schedule = a.schedule;
    opt.samples = a.samples;
    opt.seed = c.seed;
    opt.resolution = a.resolution;
    opt.workers = c.workers;
    WaistCertificate cert = verify_waist_bound(map, bound, opt);
    ReportDocument doc;
    doc.command = "waist verify";
    doc.config = {{"map", a.map}, {"bound", bound}, {"samples", a.samples}, {"seed", c.seed},
                  {"resolution", a.resolution}, {"t_schedule", a.schedule}, {"workers", c.workers}};
    if (a.map == "torus") {
        doc.config["lattice"] = a.lattice;
        doc.config["keep"] = a.keep;
    }
    Record r = make_record("waist." + a.map, "fibration", bound, cert.pass);
    r.values["map"] = cert.map;
    r.values["descended_to_rp"] = descended;
    r.values["bound"] = cert.bound;
    r.values["measured_sup"] = cert.measured_sup;
    r.values["measured_at"] = vec_json(cert.measured_at);
    r.values["lower_bound"] = cert.lower_bound;
    r.values["tolerance"] = cert.tolerance;
    for (const auto& [k, v] : cert.details) r.values[k] = v;
    doc.records.push_back(std::move(r));
    return emit(doc, c);
}

int run_waist_profile(const WaistArgs& a, const Common& c) {
    FiberMap map = make_map(a);
    std::vector<Vec> grid;
    if (map.target_dim() == 1) {
        double hi = map.kind() == FiberKind::TorusProjection ? a.lattice.back() : 1.0;
        for (int i = 0; i < a.points; ++i) grid.push_back(Vec::Constant(1, hi * i / std::max(1, a.points - 1)));
    } else {
        Rng rng(c.seed);
        for (int i = 0; i < a.points; ++i) {
            Vec y = rng.normal_vector(map.target_dim());
            grid.push_back(y / y.norm());
        }
    }
    std::erase_if(grid, [&](const Vec& y) { return !map.in_target(y); });
    WaistProfile prof = waist_profile(map, grid);
    ReportDocument doc;
    doc.command = "waist profile";
    doc.config = {{"map", a.map}, {"points", a.points}, {"seed", c.seed}};
    Record r = info_record("waist.profile." + a.map, "fibration", "");
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const auto& p : prof.points) pts.push_back({{"y", vec_json(p.y)}, {"volume", p.volume}});
    r.values["map"] = map.name();
    r.values["points"] = pts;
    if (!prof.points.empty()) {
        r.values["argmax"] = vec_json(prof.points[prof.argmax].y);
        r.values["max_volume"] = prof.points[prof.argmax].volume;
    }
    doc.records.push_back(std::move(r));
    if (!c.csv.empty())
        with_file(c.csv, [&](std::ostream& o) {
            o << "index,y,volume\n";
            for (std::size_t i = 0; i < prof.points.size(); ++i) {
                o << i << ",";
                for (int j = 0; j < prof.points[i].y.size(); ++j) o << (j ? " " : "") << prof.points[i].y[j];
                o << "," << prof.points[i].volume << "\n";
            }
        });
    return emit(doc, c);
}

// ---- crofton / content -----------------------------------------------------

struct CroftonArgs {
    std::string mesh;
    int codim = 1;
    std::int64_t samples = 10000;
    std::optional<double> expect;
    double rtol = 0.02;
};

void add_expectation(Record& r, const EstimateReport& est, const std::optional<double>& expect, double rtol) {
    r.values["estimate"] = estimate_json(est);
    if (!expect) {
        r.verdict = Verdict::Info;
        return;
    }
    double rel = std::abs(est.value - *expect) / std::abs(*expect);
    r.values["expected"] = *expect;
    r.values["relative_error"] = rel;
    r.values["tolerance"] = rtol;
    r.verdict = rel <= rtol ? Verdict::Pass : Verdict::Fail;
}

int run_crofton(const CroftonArgs& a, const Common& c) {
    SubmanifoldMesh mesh = load_mesh(a.mesh);
    EstimateReport est;
    if (mesh.spherical) {
        est = crofton_volume(mesh, a.codim, a.samples, c.seed, c.workers);
    } else {
        Vec lo = mesh.vertices.front(), hi = mesh.vertices.front();
        for (const Vec& v : mesh.vertices) {
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
        }
        est = cauchy_crofton_euclidean(mesh, a.codim, lo, hi, a.samples, c.seed, c.workers);
    }
    ReportDocument doc;
    doc.command = "crofton estimate";
    doc.config = {{"mesh", a.mesh}, {"codim", a.codim}, {"samples", a.samples}, {"seed", c.seed},
                  {"workers", c.workers}, {"rtol", a.rtol}};
    Record r = make_record("crofton.estimate", "crofton", "crofton-formula", true);
    r.values["mesh_volume"] = mesh.volume();
    add_expectation(r, est, a.expect, a.rtol);
    doc.records.push_back(std::move(r));
    return emit(doc, c);
}

struct ContentArgs {
    std::string mesh;
    std::string space = "auto";
    int codim = 1;
    std::vector<double> schedule{0.08, 0.06, 0.04, 0.02};
    std::int64_t samples = 100000;
    int order = 1;
    std::string sampler = "uniform";
    std::optional<double> expect;
    double rtol = 0.01;
};

int run_content(const ContentArgs& a, const Common& c) {
    SubmanifoldMesh mesh = load_mesh(a.mesh);
    SpaceDescriptor space;
    const int n = mesh.spherical ? mesh.ambient - 1 : mesh.ambient;
    if (a.space == "auto" || a.space == "sphere") {
        space = mesh.spherical ? SpaceDescriptor::sphere(n) : SpaceDescriptor::cube(n);
    } else if (a.space == "rp") {
        space = SpaceDescriptor::real_projective(n);
    } else if (a.space == "cp") {
        if (n % 2 == 0) throw UsageError("cp space needs an odd sphere");
        space = SpaceDescriptor::complex_projective((n - 1) / 2);
    } else if (a.space == "cube") {
        space = SpaceDescriptor::cube(n);
    } else if (a.space == "ball") {
        space = SpaceDescriptor::ball(n);
    } else {
        throw UsageError("unknown space '" + a.space + "'");
    }
    if (a.sampler != "uniform" && a.sampler != "local") throw UsageError("sampler must be uniform or local");
    MinkowskiOptions opt{a.order, a.sampler == "local" ? TubeSampler::Local : TubeSampler::Uniform, c.workers};
    EstimateReport est = lower_minkowski_content(space, mesh, a.codim, a.schedule, a.samples, c.seed, opt);
    ReportDocument doc;
    doc.command = "content minkowski";
    doc.config = {{"mesh", a.mesh}, {"space", a.space}, {"codim", a.codim}, {"t_schedule", a.schedule},
                  {"samples", a.samples}, {"seed", c.seed}, {"order", a.order}, {"sampler", a.sampler},
                  {"workers", c.workers}, {"rtol", a.rtol}};
    Record r = make_record("content.minkowski", "fibration", "", true);
    r.values["mesh_volume"] = mesh.volume();
    add_expectation(r, est, a.expect, a.rtol);
    doc.records.push_back(std::move(r));
    return emit(doc, c);
}

// ---- transport ---------------------------------------------------------------

int run_transport(const std::string& only, int points, int pairs, const Common& c) {
    ReportDocument doc;
    doc.command = "transport check";
    doc.config = {{"map", only.empty() ? "all" : only}, {"points", points}, {"pairs", pairs}, {"seed", c.seed}};
    for (auto& r : check_transport(points, pairs, c.seed))
        if (only.empty() || r.values["map"] == only) doc.records.push_back(std::move(r));
    if (doc.records.empty()) throw UsageError("unknown transport map '" + only + "'");
    if (!c.csv.empty())
        with_file(c.csv, [&](std::ostream& o) {
            o << "id,map,verdict,value\n";
            for (const auto& r : doc.records) {
                const auto& v = r.values;
                double x = v.contains("max_singular_value") ? v["max_singular_value"].get<double>()
                                                            : v["min_det_over_rho"].get<double>();
                o << r.id << "," << v["map"].get<std::string>() << "," << to_string(r.verdict) << "," << x << "\n";
            }
        });
    return emit(doc, c);
}

// ---- convex ------------------------------------------------------------------

struct BodyArgs {
    std::string body = "cube";
    int n = 3;
    double p = 2.0;
    std::vector<double> half;
    std::vector<int> dims;
    std::string vertices;
};

ConvexBody make_body(const BodyArgs& b) {
    if (b.body == "cube") return ConvexBody::cube(b.n);
    if (b.body == "cross") return ConvexBody::cross_polytope(b.n);
    if (b.body == "ball") return ConvexBody::p_ball(b.n, b.p);
    if (b.body == "box") {
        if (b.half.empty()) throw UsageError("box needs --half");
        return ConvexBody::box(Eigen::Map<const Vec>(b.half.data(), static_cast<int>(b.half.size())));
    }
    if (b.body == "balls") {
        if (b.dims.empty()) throw UsageError("balls needs --dims");
        return ConvexBody::product_of_balls(b.dims);
    }
    if (b.body == "polytope") {
        std::ifstream in(b.vertices);
        if (!in) throw UsageError("cannot read vertex file '" + b.vertices + "'");
        std::vector<Vec> pts;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            std::vector<double> xs;
            double x;
            while (ls >> x) xs.push_back(x);
            if (!xs.empty()) pts.push_back(Eigen::Map<Vec>(xs.data(), static_cast<int>(xs.size())));
        }
        return ConvexBody::polytope(pts);
    }
    throw UsageError("unknown body '" + b.body + "'");
}

void add_body_options(CLI::App* app, BodyArgs& b) {
    app->add_option("--body", b.body, "cube|cross|ball|box|balls|polytope")->capture_default_str();
    app->add_option("--n", b.n, "dimension")->capture_default_str();
    app->add_option("--p", b.p, "exponent of the p-ball (inf allowed)");
    app->add_option("--half", b.half, "half widths of the box");
    app->add_option("--dims", b.dims, "ball dimensions of the product");
    app->add_option("--vertices", b.vertices, "vertex list file, one point per line");
}

nlohmann::ordered_json body_config(const BodyArgs& b) {
    nlohmann::ordered_json j{{"body", b.body}, {"n", b.n}};
    if (b.body == "ball") j["p"] = b.p;
    if (b.body == "box") j["half"] = b.half;
    if (b.body == "balls") j["dims"] = b.dims;
    if (b.body == "polytope") j["vertices"] = b.vertices;
    return j;
}

int run_convex_width(const BodyArgs& b, const Common& c) {
    ConvexBody body = make_body(b);
    if (!body.symmetric()) throw DomainError("width check needs a centrally symmetric body");
    auto w = width(body);
    auto r = inscribed_touching_pair(body);
    double gap = std::abs(w.value - 2.0 * r.value);
    ReportDocument doc;
    doc.command = "convex width";
    doc.config = body_config(b);
    Record rec = make_record("convex.width." + body.name(), "convex", "width-inscribed", gap <= 1e-6);
    rec.values["width"] = w.value;
    rec.values["width_direction"] = vec_json(w.direction);
    rec.values["inscribed_radius"] = r.value;
    rec.values["contact_direction"] = vec_json(r.direction);
    rec.values["gap"] = gap;
    rec.values["tolerance"] = 1e-6;
    doc.records.push_back(std::move(rec));
    return emit(doc, c);
}

int run_convex_section(const BodyArgs& b, int k, std::int64_t samples, const Common& c) {
    ConvexBody body = make_body(b);
    if (k < 1 || k >= body.dim()) throw UsageError("section needs 1 <= k < n");
    Rng rng(c.seed);
    Mat frame = random_frame(body.dim(), body.dim() - k, rng);
    auto est = central_section_volume(body, frame, samples, splitmix64(c.seed), c.workers);
    ReportDocument doc;
    doc.command = "convex section";
    doc.config = body_config(b);
    doc.config["k"] = k;
    doc.config["samples"] = samples;
    doc.config["seed"] = c.seed;
    Record rec = info_record("convex.section." + body.name(), "convex", "");
    nlohmann::ordered_json cols = nlohmann::ordered_json::array();
    for (int j = 0; j < frame.cols(); ++j) cols.push_back(vec_json(frame.col(j)));
    rec.values["frame"] = cols;
    rec.values["estimate"] = estimate_json(est);
    if (body.kind() == BodyKind::Box && k == 1 && b.body == "cube") {
        rec.bound_ref = "vaaler-section";
        rec.values["bound"] = 1.0;
        rec.verdict = est.value >= 1.0 - 3.0 * est.std_error ? Verdict::Pass : Verdict::Fail;
    }
    doc.records.push_back(std::move(rec));
    return emit(doc, c);
}

int run_convex_zhang(const BodyArgs& b, int k, int restarts, std::int64_t samples, const Common& c) {
    ConvexBody body = make_body(b);
    auto s = min_section_search(body, k, restarts, samples, c.seed, c.workers);
    ReportDocument doc;
    doc.command = "convex zhang";
    doc.config = body_config(b);
    doc.config["k"] = k;
    doc.config["restarts"] = restarts;
    doc.config["samples"] = samples;
    doc.config["seed"] = c.seed;
    Record rec = make_record("convex.zhang." + body.name(), "convex", "zhang-section", s.pass);
    rec.values["bound"] = s.bound;
    rec.values["scale"] = s.scale;
    rec.values["normalization_error"] = s.normalization_error;
    rec.values["start"] = estimate_json(s.start);
    rec.values["best"] = estimate_json(s.best);
    doc.records.push_back(std::move(rec));
    return emit(doc, c);
}

// ---- isoperimetry ------------------------------------------------------------

int run_iso_torus(const std::vector<double>& lengths, int resolution, const Common& c) {
    const int n = static_cast<int>(lengths.size());
    BinaryField slab = half_slab(lengths, std::vector<int>(n, resolution), true, n - 1);
    auto est = boundary_content(slab);
    double expected = 2.0;
    for (int i = 0; i + 1 < n; ++i) expected *= lengths[i];
    auto boxes = torus_halving_translations(slab);
    double rel = std::abs(est.value - expected) / expected;
    ReportDocument doc;
    doc.command = "iso torus";
    doc.config = {{"lengths", lengths}, {"resolution", resolution}};
    Record r = make_record("iso.torus.halfslab", "torus", "torus-halfslab", rel <= 0.05 && boxes_tile(slab, boxes));
    r.values["expected"] = expected;
    r.values["relative_error"] = rel;
    r.values["tolerance"] = 0.05;
    r.values["halving_boxes"] = boxes.size();
    r.values["estimate"] = estimate_json(est);
    doc.records.push_back(std::move(r));
    return emit(doc, c);
}

int run_iso_box(const std::vector<double>& lengths, int resolution, int sets, const Common& c) {
    const int n = static_cast<int>(lengths.size());
    double bound = 1.0;
    for (int i = 0; i + 1 < n; ++i) bound *= lengths[i];
    Rng rng(c.seed);
    ReportDocument doc;
    doc.command = "iso box";
    doc.config = {{"lengths", lengths}, {"resolution", resolution}, {"sets", sets}, {"seed", c.seed}};
    std::vector<double> contents;
    int failures = 0;
    for (int i = 0; i < sets; ++i) {
        BinaryField f = random_half_volume(lengths, std::vector<int>(n, resolution), false, rng);
        double v = boundary_content(f).value;
        contents.push_back(v);
        if (v < 0.95 * bound) ++failures;
    }
    Record r = make_record("iso.box", "parallelotope", "parallelotope-isoperimetry", failures == 0);
    r.values["bound"] = bound;
    r.values["threshold"] = 0.95 * bound;
    r.values["min_content"] = *std::min_element(contents.begin(), contents.end());
    r.values["failures"] = failures;
    doc.records.push_back(std::move(r));
    if (!c.csv.empty())
        with_file(c.csv, [&](std::ostream& o) {
            o << "set,boundary_content\n";
            for (std::size_t i = 0; i < contents.size(); ++i) o << i << "," << contents[i] << "\n";
        });
    return emit(doc, c);
}

// ---- sweepout ----------------------------------------------------------------

int run_cup(int n, int k, int cells, int trials, int resolution, const std::string& command, const Common& c) {
    CupReport rep = cup_bound_check(n, k, cells, trials, c.seed, resolution);
    ReportDocument doc;
    doc.command = command;
    doc.config = {{"n", n}, {"k", k}, {"cells", cells}, {"trials", trials}, {"resolution", resolution},
                  {"seed", c.seed}};
    const double sp = std::sqrt(static_cast<double>(rep.p));
    Record r = make_record("sweepout.cup.n" + std::to_string(n) + "k" + std::to_string(k), "bending",
                           "cup-power-scaling", rep.pass);
    r.values["p"] = rep.p;
    r.values["max_total"] = rep.max_total;
    r.values["min_total"] = rep.min_total;
    r.values["max_z1"] = rep.max_z1;
    r.values["max_z2"] = rep.max_z2;
    r.values["upper"] = rep.upper_bound;
    r.values["lower_reference"] = rep.lower_reference;
    r.values["min_partition_section"] = rep.min_partition_section;
    r.values["max_components"] = rep.max_components;
    doc.records.push_back(std::move(r));
    if (n == 2 && k == 1) {
        Record t = make_record("sweepout.bend.total", "bending", "bending-total", rep.max_total <= 4 * sp + 2);
        t.values["upper"] = 4 * sp + 2;
        t.values["max_total"] = rep.max_total;
        doc.records.push_back(std::move(t));
        Record z1 = make_record("sweepout.bend.z1", "bending", "bending-z1", rep.max_z1 <= 2 * sp + 2);
        z1.values["upper"] = 2 * sp + 2;
        z1.values["max_z1"] = rep.max_z1;
        doc.records.push_back(std::move(z1));
        Record z2 = make_record("sweepout.bend.z2", "bending", "bending-z2", rep.max_z2 <= 2 * sp);
        z2.values["upper"] = 2 * sp;
        z2.values["max_z2"] = rep.max_z2;
        doc.records.push_back(std::move(z2));
    }
    if (!c.csv.empty()) with_file(c.csv, [&](std::ostream& o) { write_trial_csv(o, rep); });
    return emit(doc, c);
}

int run_algebraic(int degree, int points, std::int64_t lines, const Common& c) {
    Rng rng(c.seed);
    Polynomial2 poly;
    if (points > 0) {
        std::vector<Vec> pts;
        for (int i = 0; i < points; ++i) pts.push_back(Vec::NullaryExpr(2, [&](Eigen::Index) { return rng.uniform(); }));
        poly = interpolating_polynomial(pts, rng);
    } else {
        poly = random_polynomial(degree, rng);
    }
    auto est = algebraic_family_volume(poly, lines, splitmix64(c.seed), c.workers);
    ReportDocument doc;
    doc.command = "sweepout algebraic";
    doc.config = {{"degree", degree}, {"points", points}, {"lines", lines}, {"seed", c.seed}};
    Record r = make_record("sweepout.algebraic", "bending", "algebraic-crofton",
                           est.value <= 2.0 * poly.degree + 3.0 * est.std_error);
    r.values["degree"] = poly.degree;
    r.values["bound"] = 2.0 * poly.degree;
    r.values["coefficients"] = poly.coeffs;
    r.values["estimate"] = estimate_json(est);
    doc.records.push_back(std::move(r));
    return emit(doc, c);
}

// ---- filling -----------------------------------------------------------------

int run_fill_demo(int n, int k, const std::string& input, const std::string& chain_out, const Common& c) {
    Mod2Chain z;
    if (!input.empty()) {
        std::ifstream in(input);
        if (!in) throw UsageError("cannot read chain '" + input + "'");
        z = read_chain(in);
    } else {
        Rng rng(c.seed);
        z = random_relative_cycle(n, k, rng);
    }
    if (!is_relative_cycle(z)) throw DomainError("input chain is not a relative cycle");
    CoverLedger cover = cover_chain(z);
    FillResult f = fill(z, cover);
    const bool identity = boundary(f.filling) == relative(z);
    const double ratio = mpq_class(f.ledger.weight() / cover.weight()).get_d();
    const std::int64_t constant = filling_constant(z.dim);
    ReportDocument doc;
    doc.command = "fill demo";
    doc.config = {{"n", z.ambient}, {"k", z.dim}, {"seed", c.seed}, {"input", input}};
    Record a = make_record("fill.identity", "filling", "filling-identity", identity);
    a.values["cycle_simplices"] = z.size();
    a.values["filling_simplices"] = f.filling.size();
    doc.records.push_back(std::move(a));
    Record b = make_record("fill.constant", "filling", "filling-constant", ratio <= static_cast<double>(constant));
    b.values["cover_weight"] = cover.weight().get_str();
    b.values["ledger_weight"] = f.ledger.weight().get_str();
    b.values["ratio"] = ratio;
    b.values["constant"] = constant;
    doc.records.push_back(std::move(b));
    if (!c.csv.empty()) with_file(c.csv, [&](std::ostream& o) { write_ledger_csv(o, f.ledger); });
    if (!chain_out.empty()) with_file(chain_out, [&](std::ostream& o) { write_chain(o, f.filling); });
    return emit(doc, c);
}

int run_fill_assign(int max_k, int complexes, const Common& c) {
    ReportDocument doc;
    doc.command = "fill assign";
    doc.config = {{"max_k", max_k}, {"complexes", complexes}, {"seed", c.seed}};
    if (max_k < 1 || max_k > 3) throw UsageError("--max-k must be in 1..3");
    for (auto& r : check_star_assignment(complexes, max_k, c.seed)) doc.records.push_back(std::move(r));
    return emit(doc, c);
}

int run_fill_partition(int grids, const Common& c) {
    ReportDocument doc;
    doc.command = "fill partition";
    doc.config = {{"grids", grids}, {"seed", c.seed}};
    for (auto& r : check_partition(grids, c.seed)) doc.records.push_back(std::move(r));
    return emit(doc, c);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks of waist and filling inequalities"};
    app.set_config("--config", "", "INI file; sections name the subcommand, e.g. [waist.verify]");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    Common common;
    try {
        common.workers = default_workers();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::deque<Common> pool;
    std::function<int()> action;

    auto* waist = app.add_subcommand("waist", "fibre volumes of maps")->require_subcommand(1);
    WaistArgs wav, wap;
    auto waist_opts = [&](CLI::App* s, WaistArgs& wa) -> Common& {
        s->add_option("--map", wa.map, "hopf3|hopf7|hopf15|rp3-hopf|rp7-hopf|cp3-hopf|absz1-s3|absz1-rp3|x1sq-rp2|torus|linear")
            ->capture_default_str();
        s->add_option("--lattice", wa.lattice, "torus lattice lengths");
        s->add_option("--keep", wa.keep, "torus target dimension");
        s->add_option("--n", wa.n, "sphere dimension of the linear map");
        s->add_option("--k", wa.k, "target dimension of the linear map");
        return add_common(s, pool, common);
    };
    auto* wv = waist->add_subcommand("verify", "certify a waist bound for a map");
    Common& wv_c = waist_opts(wv, wav);
    wv->add_option("--bound", wav.bound, "bound tag (default: the natural one for the map)");
    wv->add_option("--samples", wav.samples, "tube samples")->capture_default_str();
    wv->add_option("--t", wav.schedule, "tube radii")->capture_default_str();
    wv->add_option("--resolution", wav.resolution, "fibre mesh resolution")->capture_default_str();
    wv->callback([&] { action = [&] { return run_waist_verify(wav, wv_c); }; });
    auto* wp = waist->add_subcommand("profile", "fibre volume over target points");
    Common& wp_c = waist_opts(wp, wap);
    wp->add_option("--points", wap.points, "profile points")->capture_default_str();
    wp->callback([&] { action = [&] { return run_waist_profile(wap, wp_c); }; });

    auto* crofton = app.add_subcommand("crofton", "integral geometry")->require_subcommand(1);
    CroftonArgs ca;
    auto* ce = crofton->add_subcommand("estimate", "Crofton volume of a mesh");
    ce->add_option("--mesh", ca.mesh, "mesh file")->required()->check(CLI::ExistingFile);
    ce->add_option("--codim", ca.codim, "codimension")->capture_default_str();
    ce->add_option("--samples", ca.samples, "random equators or flats")->capture_default_str();
    ce->add_option("--expect", ca.expect, "expected volume; turns the report into a pass/fail check");
    ce->add_option("--rtol", ca.rtol, "relative tolerance for --expect")->capture_default_str();
    Common& ce_c = add_common(ce, pool, common);
    ce->callback([&] { action = [&] { return run_crofton(ca, ce_c); }; });

    auto* content = app.add_subcommand("content", "Minkowski content")->require_subcommand(1);
    ContentArgs ma;
    auto* cm = content->add_subcommand("minkowski", "lower Minkowski content of a mesh");
    cm->add_option("--mesh", ma.mesh, "mesh file")->required()->check(CLI::ExistingFile);
    cm->add_option("--space", ma.space, "auto|sphere|rp|cp|cube|ball")->capture_default_str();
    cm->add_option("--codim", ma.codim, "codimension")->capture_default_str();
    cm->add_option("--t", ma.schedule, "tube radii")->capture_default_str();
    cm->add_option("--samples", ma.samples, "samples per radius")->capture_default_str();
    cm->add_option("--order", ma.order, "fit degree in t")->capture_default_str();
    cm->add_option("--sampler", ma.sampler, "uniform|local")->capture_default_str();
    cm->add_option("--expect", ma.expect, "expected content");
    cm->add_option("--rtol", ma.rtol, "relative tolerance for --expect")->capture_default_str();
    Common& cm_c = add_common(cm, pool, common);
    cm->callback([&] { action = [&] { return run_content(ma, cm_c); }; });

    auto* transport = app.add_subcommand("transport", "transport maps")->require_subcommand(1);
    std::string tmap;
    int tpoints = 1000, tpairs = 100;
    auto* tc = transport->add_subcommand("check", "Lipschitz and determinant certificates");
    tc->add_option("--map", tmap, "one builtin map (default: all)");
    tc->add_option("--points", tpoints, "points per map")->capture_default_str();
    tc->add_option("--pairs", tpairs, "(point, subspace) pairs per map")->capture_default_str();
    Common& tc_c = add_common(tc, pool, common);
    tc->callback([&] { action = [&] { return run_transport(tmap, tpoints, tpairs, tc_c); }; });

    auto* convex = app.add_subcommand("convex", "convex bodies")->require_subcommand(1);
    BodyArgs baw, bas, baz;
    int csk = 1, czk = 1, crestarts = 2;
    std::int64_t cssamples = 1 << 16, czsamples = 1 << 16;
    auto* cw = convex->add_subcommand("width", "width against twice the inscribed radius");
    add_body_options(cw, baw);
    Common& cw_c = add_common(cw, pool, common, false);
    cw->callback([&] { action = [&] { return run_convex_width(baw, cw_c); }; });
    auto* cs = convex->add_subcommand("section", "volume of a random central section");
    add_body_options(cs, bas);
    cs->add_option("--k", csk, "codimension of the section")->capture_default_str();
    cs->add_option("--samples", cssamples, "samples")->capture_default_str();
    Common& cs_c = add_common(cs, pool, common);
    cs->callback([&] { action = [&] { return run_convex_section(bas, csk, cssamples, cs_c); }; });
    auto* cz = convex->add_subcommand("zhang", "search for a small central section of the normalized body");
    add_body_options(cz, baz);
    cz->add_option("--k", czk, "codimension of the section")->capture_default_str();
    cz->add_option("--restarts", crestarts, "search restarts")->capture_default_str();
    cz->add_option("--samples", czsamples, "samples per estimate")->capture_default_str();
    Common& cz_c = add_common(cz, pool, common);
    cz->callback([&] { action = [&] { return run_convex_zhang(baz, czk, crestarts, czsamples, cz_c); }; });

    auto* iso = app.add_subcommand("iso", "isoperimetry on tori and boxes")->require_subcommand(1);
    std::vector<double> tlengths{1.0, 2.0}, blengths{1.0, 2.0};
    int tres = 256, bres = 256, isets = 50;
    auto* it = iso->add_subcommand("torus", "half-slab boundary content");
    it->add_option("--lengths", tlengths, "lattice lengths")->capture_default_str();
    it->add_option("--resolution", tres, "cells per axis")->capture_default_str();
    Common& it_c = add_common(it, pool, common, false);
    it->callback([&] { action = [&] { return run_iso_torus(tlengths, tres, it_c); }; });
    auto* ib = iso->add_subcommand("box", "random half-volume sets of a box");
    ib->add_option("--lengths", blengths, "box side lengths")->capture_default_str();
    ib->add_option("--resolution", bres, "cells per axis")->capture_default_str();
    ib->add_option("--sets", isets, "number of sets")->capture_default_str();
    Common& ib_c = add_common(ib, pool, common);
    ib->callback([&] { action = [&] { return run_iso_box(blengths, bres, isets, ib_c); }; });

    auto* sweep = app.add_subcommand("sweepout", "bent flat families")->require_subcommand(1);
    int sn = 2, sk = 1, bcells = 4, btrials = 4, bend_res = 16, ccells = 4, ctrials = 4, cres = 16, sdegree = 2, spoints = 0;
    std::int64_t slines = 20000;
    auto* sb = sweep->add_subcommand("bend", "bent lines in the unit square");
    sb->add_option("--cells", bcells, "cells per axis (2..8)")->capture_default_str();
    sb->add_option("--trials", btrials, "random directions")->capture_default_str();
    sb->add_option("--resolution", bend_res, "samples per cell side")->capture_default_str();
    Common& sb_c = add_common(sb, pool, common);
    sb->callback([&] { action = [&] { return run_cup(2, 1, bcells, btrials, bend_res, "sweepout bend", sb_c); }; });
    auto* sc = sweep->add_subcommand("cup", "bent families for (n, k) in {(2,1), (3,1), (3,2)}");
    sc->add_option("--n", sn, "dimension")->capture_default_str();
    sc->add_option("--k", sk, "codimension")->capture_default_str();
    sc->add_option("--cells", ccells, "cells per axis")->capture_default_str();
    sc->add_option("--trials", ctrials, "random directions")->capture_default_str();
    sc->add_option("--resolution", cres, "samples per cell side")->capture_default_str();
    Common& sc_c = add_common(sc, pool, common);
    sc->callback([&] { action = [&] { return run_cup(sn, sk, ccells, ctrials, cres, "sweepout cup", sc_c); }; });
    auto* sa = sweep->add_subcommand("algebraic", "length of a polynomial zero set in the square");
    sa->add_option("--degree", sdegree, "degree of a random polynomial")->capture_default_str();
    sa->add_option("--points", spoints, "interpolate this many random points instead");
    sa->add_option("--lines", slines, "random lines")->capture_default_str();
    Common& sa_c = add_common(sa, pool, common);
    sa->callback([&] { action = [&] { return run_algebraic(sdegree, spoints, slines, sa_c); }; });

    auto* fillc = app.add_subcommand("fill", "mod 2 filling of relative cycles")->require_subcommand(1);
    int fn = 2, fk = 0, fmaxk = 3, fcomplexes = 10, fgrids = 6;
    std::string fin, fout;
    auto* fd = fillc->add_subcommand("demo", "fill one relative cycle and check the identity and ledger");
    fd->add_option("--n", fn, "cube dimension (2 or 3)")->capture_default_str();
    fd->add_option("--k", fk, "cycle dimension")->capture_default_str();
    fd->add_option("--chain", fin, "read the cycle from a chain file")->check(CLI::ExistingFile);
    fd->add_option("--chain-out", fout, "write the filling chain here");
    Common& fd_c = add_common(fd, pool, common);
    fd->callback([&] { action = [&] { return run_fill_demo(fn, fk, fin, fout, fd_c); }; });
    auto* fa = fillc->add_subcommand("assign", "minimal-element star assignment on random complexes");
    fa->add_option("--max-k", fmaxk, "largest complex dimension")->capture_default_str();
    fa->add_option("--complexes", fcomplexes, "complexes per dimension")->capture_default_str();
    Common& fa_c = add_common(fa, pool, common);
    fa->callback([&] { action = [&] { return run_fill_assign(fmaxk, fcomplexes, fa_c); }; });
    auto* fp = fillc->add_subcommand("partition", "boundary identity of coloured partitions");
    fp->add_option("--grids", fgrids, "random coloured grids")->capture_default_str();
    Common& fp_c = add_common(fp, pool, common);
    fp->callback([&] { action = [&] { return run_fill_partition(fgrids, fp_c); }; });

    SuiteOptions so;
    auto* suite = app.add_subcommand("suite", "run the acceptance matrix");
    suite->add_option("--only", so.only, "criteria to run")->delimiter(',');
    Common& suite_c = add_common(suite, pool, common);
    suite->callback([&] {
        action = [&] {
            so.seed = suite_c.seed;
            so.workers = suite_c.workers;
            return emit(run_suite(so), suite_c);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        return action ? action() : 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
