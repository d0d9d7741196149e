#include "waistlab/fibrations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "waistlab/content.hpp"
#include "waistlab/errors.hpp"
#include "waistlab/quadrature.hpp"
#include "waistlab/rng.hpp"

namespace waistlab {

namespace {

constexpr double kPi = std::numbers::pi;

void check_unit(const Vec& p, int dim, const char* what) {
    if (p.size() != dim) throw DomainError(std::string(what) + ": wrong point dimension");
    if (std::abs(p.norm() - 1.0) > kGeomTol) throw DomainError(std::string(what) + ": point not on the unit sphere");
}

Vec hopf_value(const Vec& p, int m) {
    Vec a = p.head(m), b = p.tail(m);
    Vec out(m + 1);
    out[0] = a.squaredNorm() - b.squaredNorm();
    out.tail(m) = 2.0 * cd_multiply(b, cd_conjugate(a));
    return out;
}

// Orthonormal frame of the great (m-1)-sphere hopf^{-1}(y).
Mat hopf_fiber_frame(const Vec& y, int m) {
    Mat frame = Mat::Zero(2 * m, m);
    double r = y[0];
    if (r <= -1.0 + 1e-12) {
        frame.bottomRows(m).setIdentity();
        return frame;
    }
    Vec slope = y.tail(m) / (1.0 + r);
    double scale = 1.0 / std::sqrt(1.0 + slope.squaredNorm());
    for (int i = 0; i < m; ++i) {
        Vec e = Vec::Unit(m, i);
        frame.block(0, i, m, 1) = scale * e;
        frame.block(m, i, m, 1) = scale * cd_multiply(slope, e);
    }
    return frame;
}

// Coordinates in which right multiplication by i on each quaternion block is
// the standard complex structure of the CP^n model: negate every 4th coordinate.
Vec quaternion_flip(Vec p) {
    for (int i = 3; i < p.size(); i += 4) p[i] = -p[i];
    return p;
}

bool scalar_target(FiberKind k) {
    return k == FiberKind::AbsZ1OnS3 || k == FiberKind::AbsZ1OnRP3 || k == FiberKind::X1SquaredOnRP2;
}

}  // namespace

Vec cd_conjugate(const Vec& x) {
    Vec c = -x;
    c[0] = x[0];
    return c;
}

Vec cd_multiply(const Vec& x, const Vec& y) {
    const int m = static_cast<int>(x.size());
    if (y.size() != m || (m & (m - 1)) != 0 || m > 8) throw UsageError("cd_multiply: sizes must match and be 1, 2, 4 or 8");
    if (m == 1) return Vec::Constant(1, x[0] * y[0]);
    const int h = m / 2;
    Vec a = x.head(h), b = x.tail(h), c = y.head(h), d = y.tail(h);
    Vec out(m);
    out.head(h) = cd_multiply(a, c) - cd_multiply(cd_conjugate(d), b);
    out.tail(h) = cd_multiply(d, a) + cd_multiply(b, cd_conjugate(c));
    return out;
}

FiberMap FiberMap::linear_projection(int n, const Mat& rows) {
    if (rows.cols() != n + 1 || rows.rows() < 1 || rows.rows() > n)
        throw UsageError("linear_projection: need a k x (n+1) matrix with 1 <= k <= n");
    if (!is_orthonormal(rows.transpose())) throw UsageError("linear_projection: rows must be orthonormal");
    FiberMap f;
    f.kind_ = FiberKind::LinearProjection;
    f.source_ = SpaceDescriptor::sphere(n);
    f.target_dim_ = static_cast<int>(rows.rows());
    f.fiber_dim_ = n - f.target_dim_;
    f.matrix_ = rows;
    return f;
}

FiberMap FiberMap::hopf_3_2() {
    FiberMap f;
    f.kind_ = FiberKind::Hopf;
    f.algebra_ = 2;
    f.source_ = SpaceDescriptor::sphere(3);
    f.target_dim_ = 3;
    f.fiber_dim_ = 1;
    return f;
}

FiberMap FiberMap::hopf_7_4() {
    FiberMap f = hopf_3_2();
    f.algebra_ = 4;
    f.source_ = SpaceDescriptor::sphere(7);
    f.target_dim_ = 5;
    f.fiber_dim_ = 3;
    return f;
}

FiberMap FiberMap::hopf_15_8() {
    FiberMap f = hopf_3_2();
    f.algebra_ = 8;
    f.source_ = SpaceDescriptor::sphere(15);
    f.target_dim_ = 9;
    f.fiber_dim_ = 7;
    return f;
}

FiberMap FiberMap::rp_quotient(const FiberMap& upstairs) {
    if (upstairs.kind_ != FiberKind::Hopf && upstairs.kind_ != FiberKind::AbsZ1OnS3)
        throw UsageError("rp_quotient: the map must be even (Hopf or |z1|)");
    FiberMap f;
    f.kind_ = FiberKind::RpQuotient;
    f.source_ = SpaceDescriptor::real_projective(upstairs.source_.intrinsic_dim);
    f.target_dim_ = upstairs.target_dim_;
    f.fiber_dim_ = upstairs.fiber_dim_;
    f.algebra_ = upstairs.algebra_;
    f.upstairs_ = std::make_shared<const FiberMap>(upstairs);
    return f;
}

FiberMap FiberMap::cp_quotient(const FiberMap& upstairs) {
    if (upstairs.kind_ != FiberKind::Hopf || upstairs.algebra_ != 4)
        throw UsageError("cp_quotient: implemented for the quaternionic Hopf map S^7 -> S^4 only");
    FiberMap f;
    f.kind_ = FiberKind::CpQuotient;
    f.source_ = SpaceDescriptor::complex_projective(3);
    f.target_dim_ = upstairs.target_dim_;
    f.fiber_dim_ = upstairs.fiber_dim_ - 1;
    f.algebra_ = 4;
    f.upstairs_ = std::make_shared<const FiberMap>(upstairs);
    return f;
}

FiberMap FiberMap::abs_z1_on_s3() {
    FiberMap f;
    f.kind_ = FiberKind::AbsZ1OnS3;
    f.source_ = SpaceDescriptor::sphere(3);
    f.target_dim_ = 1;
    f.fiber_dim_ = 2;
    return f;
}

FiberMap FiberMap::abs_z1_on_rp3() {
    FiberMap f = rp_quotient(abs_z1_on_s3());
    f.kind_ = FiberKind::AbsZ1OnRP3;
    return f;
}

FiberMap FiberMap::x1_squared_on_rp2() {
    FiberMap f;
    f.kind_ = FiberKind::X1SquaredOnRP2;
    f.source_ = SpaceDescriptor::real_projective(2);
    f.target_dim_ = 1;
    f.fiber_dim_ = 1;
    return f;
}

FiberMap FiberMap::torus_projection(std::vector<double> lattice, int k) {
    const int n = static_cast<int>(lattice.size());
    if (k < 1 || k >= n) throw UsageError("torus_projection: need 1 <= k < n");
    FiberMap f;
    f.kind_ = FiberKind::TorusProjection;
    f.source_ = SpaceDescriptor::torus(std::move(lattice));
    f.target_dim_ = k;
    f.fiber_dim_ = n - k;
    return f;
}

std::string FiberMap::name() const {
    switch (kind_) {
        case FiberKind::LinearProjection:
            return "linear_projection(S^" + std::to_string(source_.intrinsic_dim) + "->R^" +
                   std::to_string(target_dim_) + ")";
        case FiberKind::Hopf:
            return "hopf_" + std::to_string(2 * algebra_ - 1) + "_" + std::to_string(algebra_);
        case FiberKind::RpQuotient: return "rp_quotient(" + upstairs_->name() + ")";
        case FiberKind::CpQuotient: return "cp_quotient(" + upstairs_->name() + ")";
        case FiberKind::AbsZ1OnS3: return "abs_z1_on_S3";
        case FiberKind::AbsZ1OnRP3: return "abs_z1_on_RP3";
        case FiberKind::X1SquaredOnRP2: return "x1_squared_on_RP2";
        case FiberKind::TorusProjection: {
            std::string s = "torus_projection(T";
            for (double a : source_.lengths) s += "_" + std::to_string(a).substr(0, 4);
            return s + "->" + std::to_string(target_dim_) + ")";
        }
    }
    return "unknown";
}

Vec FiberMap::evaluate(const Vec& p) const {
    const int amb = source_.ambient_dim;
    switch (kind_) {
        case FiberKind::LinearProjection: check_unit(p, amb, "evaluate"); return matrix_ * p;
        case FiberKind::Hopf: check_unit(p, amb, "evaluate"); return hopf_value(p, algebra_);
        case FiberKind::RpQuotient:
        case FiberKind::AbsZ1OnRP3: return upstairs_->evaluate(p);
        case FiberKind::CpQuotient: check_unit(p, amb, "evaluate"); return upstairs_->evaluate(quaternion_flip(p));
        case FiberKind::AbsZ1OnS3: check_unit(p, amb, "evaluate"); return Vec::Constant(1, std::hypot(p[0], p[1]));
        case FiberKind::X1SquaredOnRP2: check_unit(p, amb, "evaluate"); return Vec::Constant(1, p[0] * p[0]);
        case FiberKind::TorusProjection: {
            if (p.size() != amb) throw DomainError("evaluate: wrong point dimension");
            Vec r = reduce_torus(source_, p);
            return r.tail(target_dim_);
        }
    }
    throw UsageError("evaluate: unknown map");
}

bool FiberMap::in_target(const Vec& y) const {
    if (y.size() != target_dim_) return false;
    switch (kind_) {
        case FiberKind::LinearProjection: return y.norm() <= 1.0 + kGeomTol;
        case FiberKind::Hopf:
        case FiberKind::RpQuotient:
        case FiberKind::CpQuotient:
            if (upstairs_ && upstairs_->kind_ == FiberKind::AbsZ1OnS3) return y[0] >= 0.0 && y[0] <= 1.0;
            return std::abs(y.norm() - 1.0) <= kGeomTol;
        case FiberKind::AbsZ1OnS3:
        case FiberKind::AbsZ1OnRP3:
        case FiberKind::X1SquaredOnRP2: return y[0] >= 0.0 && y[0] <= 1.0;
        case FiberKind::TorusProjection: {
            const int n = source_.intrinsic_dim;
            for (int i = 0; i < target_dim_; ++i)
                if (y[i] < 0.0 || y[i] >= source_.lengths[n - target_dim_ + i]) return false;
            return true;
        }
    }
    return false;
}

double FiberMap::fiber_volume(const Vec& y) const {
    if (!in_target(y)) throw DomainError("fiber_volume: point outside the target");
    switch (kind_) {
        case FiberKind::LinearProjection: {
            double rho2 = std::max(0.0, 1.0 - y.squaredNorm());
            if (rho2 == 0.0 && fiber_dim_ > 0) return 0.0;
            return sphere_volume(fiber_dim_) * std::pow(rho2, 0.5 * fiber_dim_);
        }
        case FiberKind::Hopf: return sphere_volume(fiber_dim_);
        case FiberKind::RpQuotient:
        case FiberKind::AbsZ1OnRP3: return 0.5 * upstairs_->fiber_volume(y);
        case FiberKind::CpQuotient: return upstairs_->fiber_volume(y) / (2.0 * kPi);
        case FiberKind::AbsZ1OnS3: {
            double t = y[0];
            return 4.0 * kPi * kPi * t * std::sqrt(std::max(0.0, 1.0 - t * t));
        }
        case FiberKind::X1SquaredOnRP2: {
            double v = y[0];
            if (v == 0.0) return kPi;
            if (v >= 1.0) return 0.0;
            return 2.0 * kPi * std::sqrt(1.0 - v);
        }
        case FiberKind::TorusProjection: {
            double vol = 1.0;
            for (int i = 0; i < fiber_dim_; ++i) vol *= source_.lengths[i];
            return vol;
        }
    }
    return 0.0;
}

SubmanifoldMesh FiberMap::fiber_mesh(const Vec& y, int resolution) const {
    if (resolution < 1) throw DomainError("fiber_mesh: resolution must be positive");
    if (!in_target(y)) throw DomainError("fiber_mesh: point outside the target");
    SubmanifoldMesh empty;
    empty.ambient = source_.ambient_dim;
    empty.spherical = kind_ != FiberKind::TorusProjection;
    empty.dim = kind_ == FiberKind::CpQuotient ? fiber_dim_ + 1 : fiber_dim_;
    switch (kind_) {
        case FiberKind::LinearProjection: {
            double rho2 = 1.0 - y.squaredNorm();
            if (rho2 <= 0.0) return empty;
            Mat kernel = orthogonal_complement(matrix_.transpose());
            SubmanifoldMesh mesh = great_sphere_mesh(kernel, resolution);
            Vec centre = matrix_.transpose() * y;
            for (auto& v : mesh.vertices) v = centre + std::sqrt(rho2) * v;
            return mesh;
        }
        case FiberKind::Hopf: return great_sphere_mesh(hopf_fiber_frame(y, algebra_), resolution);
        case FiberKind::RpQuotient:
        case FiberKind::AbsZ1OnRP3: return upstairs_->fiber_mesh(y, resolution);
        case FiberKind::CpQuotient: {
            SubmanifoldMesh mesh = upstairs_->fiber_mesh(y, resolution);
            for (auto& v : mesh.vertices) v = quaternion_flip(v);
            return mesh;
        }
        case FiberKind::AbsZ1OnS3: {
            double t = y[0];
            if (t <= 0.0 || t >= 1.0) return empty;
            double s = std::sqrt(1.0 - t * t);
            auto param = [t, s](double u, double v) {
                Vec p(4);
                p << t * std::cos(2 * kPi * u), t * std::sin(2 * kPi * u), s * std::cos(2 * kPi * v),
                    s * std::sin(2 * kPi * v);
                return p;
            };
            return surface_mesh(param, resolution, resolution, true, true, true);
        }
        case FiberKind::X1SquaredOnRP2: {
            double v = y[0];
            if (v >= 1.0) return empty;
            auto circle = [&](double x0) {
                double r = std::sqrt(1.0 - x0 * x0);
                std::vector<Vec> pts;
                for (int i = 0; i < resolution; ++i) {
                    double a = 2 * kPi * i / resolution;
                    Vec p(3);
                    p << x0, r * std::cos(a), r * std::sin(a);
                    pts.push_back(p);
                }
                return polyline_mesh(pts, true, true);
            };
            if (v == 0.0) return circle(0.0);
            SubmanifoldMesh mesh = circle(std::sqrt(v));
            mesh.append(circle(-std::sqrt(v)));
            return mesh;
        }
        case FiberKind::TorusProjection: {
            const auto& a = source_.lengths;
            const int n = source_.intrinsic_dim;
            auto point = [&](const Vec& free) {
                Vec p(n);
                p.head(fiber_dim_) = free;
                p.tail(target_dim_) = y;
                return p;
            };
            if (fiber_dim_ == 1) {
                std::vector<Vec> pts;
                for (int i = 0; i <= resolution; ++i) pts.push_back(point(Vec::Constant(1, a[0] * i / resolution)));
                return polyline_mesh(pts, false, false);
            }
            if (fiber_dim_ == 2) {
                auto param = [&](double u, double v) {
                    Vec f(2);
                    f << a[0] * u, a[1] * v;
                    return point(f);
                };
                return surface_mesh(param, resolution, resolution, false, false, false);
            }
            throw UsageError("fiber_mesh: torus fibres of dimension > 2 are not meshed");
        }
    }
    return empty;
}

WaistProfile waist_profile(const FiberMap& map, const std::vector<Vec>& grid) {
    if (grid.empty()) throw UsageError("waist_profile: empty grid");
    WaistProfile prof;
    for (const auto& y : grid) prof.points.push_back({y, map.fiber_volume(y)});
    for (std::size_t i = 1; i < prof.points.size(); ++i)
        if (prof.points[i].volume > prof.points[prof.argmax].volume) prof.argmax = i;
    return prof;
}

double great_sphere_tube_volume(int n, int d, double t) {
    if (d < 0 || d > n) throw DomainError("tube volume: need 0 <= d <= n");
    const int k = n - d;
    if (k == 0) return sphere_volume(n);
    double top = std::min(t, 0.5 * kPi);
    double integral = integrate([&](double th) { return std::pow(std::sin(th), k - 1) * std::pow(std::cos(th), d); },
                                0.0, top);
    return sphere_volume(d) * sphere_volume(k - 1) * integral;
}

double rp_tube_volume(int n, int d, double t) { return 0.5 * great_sphere_tube_volume(n, d, t); }

double cp_tube_volume(int n, int d, double t) {
    return great_sphere_tube_volume(2 * n + 1, 2 * d + 1, t) / (2.0 * kPi);
}

ProfilePoint measured_sup(const FiberMap& map) {
    if (scalar_target(map.kind()) ||
        (map.kind() == FiberKind::RpQuotient && map.target_dim() == 1)) {
        auto f = [&](double y) { return map.fiber_volume(Vec::Constant(1, y)); };
        const int n = 1000;
        int best = 0;
        for (int i = 1; i <= n; ++i)
            if (f(static_cast<double>(i) / n) > f(static_cast<double>(best) / n)) best = i;
        double lo = std::max(0, best - 1) / static_cast<double>(n);
        double hi = std::min(n, best + 1) / static_cast<double>(n);
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
        double fa = f(a), fb = f(b);
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            if (fa >= fb) {
                hi = b;
                b = a;
                fb = fa;
                a = hi - g * (hi - lo);
                fa = f(a);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + g * (hi - lo);
                fb = f(b);
            }
        }
        ProfilePoint grid_best{Vec::Constant(1, best / static_cast<double>(n)), f(best / static_cast<double>(n))};
        ProfilePoint refined{Vec::Constant(1, fa >= fb ? a : b), std::max(fa, fb)};
        return refined.volume >= grid_best.volume ? refined : grid_best;
    }
    std::vector<Vec> grid;
    Rng rng(0x5eedULL);
    const int m = map.target_dim();
    switch (map.kind()) {
        case FiberKind::LinearProjection:
            grid.push_back(Vec::Zero(m));
            for (int i = 0; i < 100; ++i) grid.push_back(sample_uniform(SpaceDescriptor::ball(m), rng));
            break;
        case FiberKind::TorusProjection: {
            const auto& a = map.source().lengths;
            for (int i = 0; i < 100; ++i) {
                Vec y(m);
                for (int j = 0; j < m; ++j) y[j] = a[a.size() - m + j] * rng.uniform();
                grid.push_back(y);
            }
            break;
        }
        default:
            grid.push_back(Vec::Unit(m, 0));
            grid.push_back(-Vec::Unit(m, 0));
            for (int i = 0; i < 98; ++i) grid.push_back(sample_uniform(SpaceDescriptor::sphere(m - 1), rng));
    }
    auto prof = waist_profile(map, grid);
    return prof.points[prof.argmax];
}

WaistCertificate verify_waist_bound(const FiberMap& map, const std::string& tag, const VerifyOptions& opt) {
    WaistCertificate c;
    c.map = map.name();
    c.bound_ref = tag;
    const SpaceDescriptor& src = map.source();
    const int n = src.intrinsic_dim;
    const int d = map.fiber_dim();
    auto require = [&](bool ok) {
        if (!ok) throw UsageError("verify_waist_bound: bound '" + tag + "' does not apply to " + map.name());
    };
    ProfilePoint sup = measured_sup(map);
    c.measured_sup = sup.volume;
    c.measured_at = sup.y;
    if (tag == "sphere-equator") {
        require(src.kind == SpaceKind::Sphere);
        c.bound = sphere_volume(d);
    } else if (tag == "even-map-pi") {
        require(src.kind == SpaceKind::RealProjective && d == 1);
        c.bound = kPi;
    } else if (tag == "rp3-pi2") {
        require(src.kind == SpaceKind::RealProjective && n == 3 && d == 2);
        c.bound = kPi * kPi;
    } else if (tag == "rpn-volume") {
        require(src.kind == SpaceKind::RealProjective);
        c.bound = 0.5 * sphere_volume(d);
    } else if (tag == "torus-product") {
        require(src.kind == SpaceKind::Torus);
        c.bound = 1.0;
        for (int i = 0; i < d; ++i) c.bound *= src.lengths[i];
    } else if (tag == "x1sq-2pi") {
        require(map.kind() == FiberKind::X1SquaredOnRP2);
        c.bound = 2.0 * kPi;
    } else if (tag == "hopf-constant") {
        require(map.kind() == FiberKind::Hopf || map.kind() == FiberKind::RpQuotient ||
                map.kind() == FiberKind::CpQuotient);
        require(map.target_dim() > 1);
        Rng rng(opt.seed);
        double lo = sup.volume, hi = sup.volume;
        for (int i = 0; i < 100; ++i) {
            double v = map.fiber_volume(sample_uniform(SpaceDescriptor::sphere(map.target_dim() - 1), rng));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        c.bound = lo;
        c.details.emplace_back("relative_spread", (hi - lo) / hi);
        c.pass = (hi - lo) <= 1e-9 * hi;
        return c;
    } else if (tag == "rpn-nu-t" || tag == "cpn-nu-t") {
        bool rp = tag == "rpn-nu-t";
        require(rp ? src.kind == SpaceKind::RealProjective : src.kind == SpaceKind::ComplexProjective);
        SubmanifoldMesh mesh = map.fiber_mesh(sup.y, opt.resolution);
        TubeOptions tube{TubeSampler::Local, opt.workers};
        c.pass = true;
        c.tolerance = 0.02;
        for (std::size_t i = 0; i < opt.t_schedule.size(); ++i) {
            double t = opt.t_schedule[i];
            double bound = rp ? rp_tube_volume(n, d, t) : cp_tube_volume(n / 2, d / 2, t);
            auto est = neighborhood_volume(src, mesh, t, opt.samples, splitmix64(opt.seed + i), tube);
            bool ok = est.value >= bound * (1.0 - c.tolerance) - 3.0 * est.std_error;
            c.pass = c.pass && ok;
            c.details.emplace_back("t", t);
            c.details.emplace_back("tube_volume", est.value);
            c.details.emplace_back("tube_std_error", est.std_error);
            c.details.emplace_back("tube_bound", bound);
            c.bound = bound;
            c.measured_sup = est.value;
        }
        return c;
    } else {
        throw UsageError("verify_waist_bound: unknown bound tag '" + tag + "'");
    }
    c.pass = c.measured_sup >= c.bound * (1.0 - c.tolerance);
    c.details.emplace_back("ratio", c.measured_sup / c.bound);
    return c;
}

}  // namespace waistlab
