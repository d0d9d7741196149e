#include "waistlab/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "waistlab/errors.hpp"
#include "waistlab/parallel.hpp"
#include "waistlab/rng.hpp"

namespace waistlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lp_norm(const Vec& x, double p) {
    if (std::isinf(p)) return x.cwiseAbs().maxCoeff();
    if (p == 1.0) return x.cwiseAbs().sum();
    if (p == 2.0) return x.norm();
    double m = x.cwiseAbs().maxCoeff();
    if (m == 0.0) return 0.0;
    return m * std::pow((x.cwiseAbs() / m).array().pow(p).sum(), 1.0 / p);
}

double dual_exponent(double p) {
    if (std::isinf(p)) return 1.0;
    if (p == 1.0) return kInf;
    return p / (p - 1.0);
}

// Facets of conv(vertices) by brute force over n-subsets of vertices.
void enumerate_facets(const std::vector<Vec>& verts, std::vector<Vec>& normals, std::vector<double>& offsets) {
    const int n = static_cast<int>(verts.front().size());
    const int m = static_cast<int>(verts.size());
    std::vector<int> pick(n);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == n) {
            Mat diffs(n - 1, n);
            for (int i = 1; i < n; ++i) diffs.row(i - 1) = (verts[pick[i]] - verts[pick[0]]).transpose();
            Vec a;
            if (n == 1) {
                a = Vec::Ones(1);
            } else {
                Eigen::FullPivLU<Mat> lu(diffs);
                if (lu.rank() < n - 1) return;
                Mat ker = lu.kernel();
                if (ker.cols() != 1) return;
                a = ker.col(0).normalized();
            }
            double b = a.dot(verts[pick[0]]);
            bool above = false, below = false;
            for (const auto& v : verts) {
                double s = a.dot(v) - b;
                if (s > 1e-10) above = true;
                if (s < -1e-10) below = true;
            }
            if (above && below) return;
            if (above) {
                a = -a;
                b = -b;
            }
            for (std::size_t f = 0; f < normals.size(); ++f)
                if ((normals[f] - a).norm() < 1e-9 && std::abs(offsets[f] - b) < 1e-9) return;
            normals.push_back(a);
            offsets.push_back(b);
            return;
        }
        for (int i = start; i < m; ++i) {
            pick[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
}

double radical_inverse(std::uint64_t i, int base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

// Quasi-uniform unit vectors: Halton points pushed through the normal quantile.
std::vector<Vec> halton_directions(int n, int count) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    std::vector<Vec> out;
    for (int i = 1; out.size() < static_cast<std::size_t>(count); ++i) {
        Vec g(n);
        for (int j = 0; j < n; ++j) {
            double u = radical_inverse(static_cast<std::uint64_t>(i), primes[j % 16]);
            g[j] = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
        }
        if (g.norm() > 1e-12) out.push_back(g.normalized());
    }
    return out;
}

// Derivative-free minimization of f over the unit sphere from several starts:
// compass search along randomly rotated tangent bases with halving steps.
DirectionalValue sphere_minimize(int n, const std::function<double(const Vec&)>& f, int starts) {
    std::vector<Vec> seeds = halton_directions(n, starts);
    for (int i = 0; i < n; ++i) {
        seeds.push_back(Vec::Unit(n, i));
        seeds.push_back(-Vec::Unit(n, i));
    }
    Rng rng(0x77617973ULL + static_cast<std::uint64_t>(n));
    DirectionalValue best{kInf, Vec::Unit(n, 0)};
    for (const auto& s : seeds) {
        Vec u = s;
        double fu = f(u);
        double step = 0.25;
        while (step > 1e-11 && n > 1) {
            Mat basis = orthogonal_complement(u) * random_rotation(n - 1, rng);
            bool improved = false;
            for (int j = 0; j < basis.cols() && !improved; ++j)
                for (double sign : {1.0, -1.0}) {
                    Vec v = (u + sign * step * basis.col(j)).normalized();
                    double fv = f(v);
                    if (fv < fu) {
                        u = v;
                        fu = fv;
                        improved = true;
                        break;
                    }
                }
            if (!improved) step *= 0.5;
        }
        if (fu < best.value) best = {fu, u};
    }
    return best;
}

Mat check_frame(const Mat& frame, int n) {
    if (frame.rows() != n || frame.cols() < 1) throw UsageError("section: frame has the wrong shape");
    if (!is_orthonormal(frame)) throw UsageError("section: frame columns must be orthonormal");
    return frame;
}

}  // namespace

ConvexBody ConvexBody::p_ball(int n, double p, double radius) {
    if (n < 1 || !(p >= 1.0) || !(radius > 0)) throw DomainError("p_ball: need n >= 1, p >= 1, radius > 0");
    ConvexBody b;
    b.kind_ = BodyKind::PBall;
    b.n_ = n;
    b.p_ = p;
    b.radius_ = radius;
    b.name_ = "p_ball(n=" + std::to_string(n) + ",p=" + (std::isinf(p) ? std::string("inf") : std::to_string(p)) + ")";
    return b;
}

ConvexBody ConvexBody::polytope(std::vector<Vec> vertices) {
    if (vertices.empty()) throw DomainError("polytope: no vertices");
    ConvexBody b;
    b.kind_ = BodyKind::Polytope;
    b.n_ = static_cast<int>(vertices.front().size());
    b.vertices_ = std::move(vertices);
    enumerate_facets(b.vertices_, b.normals_, b.offsets_);
    if (b.normals_.size() < static_cast<std::size_t>(b.n_ + 1)) throw DomainError("polytope: vertices are not full-dimensional");
    b.symmetric_ = true;
    for (std::size_t i = 0; i < b.normals_.size(); ++i) {
        const double ni = b.normals_[i].norm();
        bool found = false;
        for (std::size_t j = 0; j < b.normals_.size() && !found; ++j) {
            const double nj = b.normals_[j].norm();
            found = (b.normals_[i] / ni + b.normals_[j] / nj).norm() < 1e-9 &&
                    std::abs(b.offsets_[i] / ni - b.offsets_[j] / nj) < 1e-9;
        }
        if (!found) b.symmetric_ = false;
    }
    b.name_ = "polytope(" + std::to_string(b.vertices_.size()) + " vertices)";
    return b;
}

ConvexBody ConvexBody::box(const Vec& half_widths) {
    if (half_widths.size() < 1 || (half_widths.array() <= 0).any())
        throw DomainError("box: half widths must be positive");
    ConvexBody b;
    b.kind_ = BodyKind::Box;
    b.n_ = static_cast<int>(half_widths.size());
    b.half_ = half_widths;
    b.name_ = "box(n=" + std::to_string(b.n_) + ")";
    return b;
}

ConvexBody ConvexBody::cube(int n, double side) {
    ConvexBody b = box(Vec::Constant(n, 0.5 * side));
    b.name_ = "cube(n=" + std::to_string(n) + ")";
    return b;
}

ConvexBody ConvexBody::cross_polytope(int n) {
    ConvexBody b = p_ball(n, 1.0, 1.0);
    b.name_ = "cross_polytope(n=" + std::to_string(n) + ")";
    return b;
}

ConvexBody ConvexBody::product_of_balls(std::vector<int> dims) {
    if (dims.empty()) throw DomainError("product_of_balls: no factors");
    ConvexBody b;
    b.kind_ = BodyKind::ProductOfBalls;
    b.n_ = 0;
    std::string label;
    for (int d : dims) {
        if (d < 1) throw DomainError("product_of_balls: factor dimensions must be positive");
        b.n_ += d;
        b.radii_.push_back(std::pow(ball_volume(d), -1.0 / d));
        label += (label.empty() ? "" : "x") + std::to_string(d);
    }
    b.dims_ = std::move(dims);
    b.name_ = "product_of_balls(" + label + ")";
    return b;
}

double ConvexBody::support0(const Vec& u) const {
    switch (kind_) {
        case BodyKind::PBall: return radius_ * lp_norm(u, dual_exponent(p_));
        case BodyKind::Box: return half_.dot(u.cwiseAbs());
        case BodyKind::Polytope: {
            double h = -kInf;
            for (const auto& v : vertices_) h = std::max(h, v.dot(u));
            return h;
        }
        case BodyKind::ProductOfBalls: {
            double h = 0.0;
            int off = 0;
            for (std::size_t i = 0; i < dims_.size(); ++i) {
                h += radii_[i] * u.segment(off, dims_[i]).norm();
                off += dims_[i];
            }
            return h;
        }
    }
    return 0.0;
}

bool ConvexBody::contains0(const Vec& x) const {
    switch (kind_) {
        case BodyKind::PBall: return lp_norm(x, p_) <= radius_;
        case BodyKind::Box:
            for (int i = 0; i < n_; ++i)
                if (std::abs(x[i]) > half_[i]) return false;
            return true;
        case BodyKind::Polytope:
            for (std::size_t f = 0; f < normals_.size(); ++f)
                if (normals_[f].dot(x) > offsets_[f]) return false;
            return true;
        case BodyKind::ProductOfBalls: {
            int off = 0;
            for (std::size_t i = 0; i < dims_.size(); ++i) {
                if (x.segment(off, dims_[i]).norm() > radii_[i]) return false;
                off += dims_[i];
            }
            return true;
        }
    }
    return false;
}

double ConvexBody::radial0(const Vec& u) const {
    switch (kind_) {
        case BodyKind::PBall: return radius_ / lp_norm(u, p_);
        case BodyKind::Box: {
            double r = kInf;
            for (int i = 0; i < n_; ++i)
                if (u[i] != 0.0) r = std::min(r, half_[i] / std::abs(u[i]));
            return r;
        }
        case BodyKind::Polytope: {
            double r = kInf;
            for (std::size_t f = 0; f < normals_.size(); ++f) {
                if (offsets_[f] <= 0.0) throw DomainError("radial: origin is not interior");
                double a = normals_[f].dot(u);
                if (a > 0) r = std::min(r, offsets_[f] / a);
            }
            return r;
        }
        case BodyKind::ProductOfBalls: {
            double r = kInf;
            int off = 0;
            for (std::size_t i = 0; i < dims_.size(); ++i) {
                double s = u.segment(off, dims_[i]).norm();
                if (s > 0) r = std::min(r, radii_[i] / s);
                off += dims_[i];
            }
            return r;
        }
    }
    return 0.0;
}

double ConvexBody::support(const Vec& u) const {
    if (u.size() != n_) throw UsageError("support: dimension mismatch");
    return scale_ * support0(u);
}

bool ConvexBody::contains(const Vec& x) const {
    if (x.size() != n_) throw UsageError("contains: dimension mismatch");
    return contains0(x / scale_);
}

double ConvexBody::radial(const Vec& u) const {
    if (u.size() != n_) throw UsageError("radial: dimension mismatch");
    return scale_ * radial0(u);
}

ConvexBody ConvexBody::scaled(double factor) const {
    if (!(factor > 0)) throw DomainError("scaled: factor must be positive");
    ConvexBody b = *this;
    b.scale_ *= factor;
    return b;
}

Vec ConvexBody::lower() const {
    Vec lo(n_);
    for (int i = 0; i < n_; ++i) lo[i] = -support(-Vec::Unit(n_, i));
    return lo;
}

Vec ConvexBody::upper() const {
    Vec hi(n_);
    for (int i = 0; i < n_; ++i) hi[i] = support(Vec::Unit(n_, i));
    return hi;
}

double ConvexBody::exact_volume() const {
    double s = std::pow(scale_, n_);
    switch (kind_) {
        case BodyKind::Box: return s * (2.0 * half_).prod();
        case BodyKind::ProductOfBalls: return s;
        case BodyKind::PBall: {
            double p = p_;
            double unit = std::isinf(p) ? std::pow(2.0, n_)
                                        : std::pow(2.0 * std::tgamma(1.0 + 1.0 / p), n_) / std::tgamma(1.0 + n_ / p);
            return s * unit * std::pow(radius_, n_);
        }
        case BodyKind::Polytope: return -1.0;
    }
    return -1.0;
}

SpaceDescriptor ConvexBody::as_space() const {
    auto self = std::make_shared<ConvexBody>(*this);
    auto handle = std::make_shared<BodyHandle>();
    handle->contains = [self](const Vec& x) { return self->contains(x); };
    handle->lower = lower();
    handle->upper = upper();
    return SpaceDescriptor::convex_body(n_, handle);
}

DirectionalValue width(const ConvexBody& body, int iterations) {
    if (iterations < 1) throw UsageError("width: iterations must be positive");
    auto f = [&](const Vec& u) {
        double w = body.support(u) + body.support(-u);
        if (!std::isfinite(w)) throw DomainError("width: unbounded support");
        return w;
    };
    DirectionalValue best = sphere_minimize(body.dim(), f, iterations);
    // The search ends on a kink of h for polytopes; facet normals are exact candidates.
    for (const Vec& a : body.facet_normals()) {
        Vec u = a.normalized();
        double w = f(u);
        if (w < best.value) best = {w, u};
    }
    return best;
}

DirectionalValue inscribed_touching_pair(const ConvexBody& body, int iterations) {
    if (!body.contains(Vec::Zero(body.dim())) ) throw DomainError("inscribed_touching_pair: origin is not interior");
    auto f = [&](const Vec& u) { return body.radial(u); };
    auto r = sphere_minimize(body.dim(), f, iterations);
    for (const Vec& a : body.facet_normals()) {
        Vec u = a.normalized();
        double v = f(u);
        if (v < r.value) r = {v, u};
    }
    if (!(r.value > 0)) throw DomainError("inscribed_touching_pair: origin is not interior");
    return r;
}

EstimateReport central_section_volume(const ConvexBody& body, const Mat& frame, std::int64_t samples,
                                      std::uint64_t seed, int workers, const Vec& offset) {
    const int n = body.dim();
    check_frame(frame, n);
    if (samples <= 0) throw UsageError("central_section_volume: samples must be positive");
    const int m = static_cast<int>(frame.cols());
    Vec base = offset.size() == 0 ? Vec(Vec::Zero(n)) : offset;
    // Coordinates c with base + F c in K satisfy -h(-b_j) - <base,b_j> <= c_j <= h(b_j) - <base,b_j>.
    Vec lo(m), hi(m);
    for (int j = 0; j < m; ++j) {
        Vec b = frame.col(j);
        lo[j] = -body.support(-b) - base.dot(b);
        hi[j] = body.support(b) - base.dot(b);
    }
    double box = (hi - lo).cwiseMax(0.0).prod();
    EstimateReport r;
    r.samples = samples;
    r.seed = seed;
    r.method = "section_box_mc";
    if (box == 0.0) return r;
    auto acc = sample_mean(samples, seed, workers, [&](Rng& rng, std::int64_t) {
        thread_local Vec c, x;
        c.resize(m);
        for (int j = 0; j < m; ++j) c[j] = rng.uniform(lo[j], hi[j]);
        x.noalias() = frame * c;
        x += base;
        return body.contains(x) ? 1.0 : 0.0;
    });
    r.value = box * acc.mean();
    r.std_error = box * acc.std_error();
    r.diagnostics = {{"box_volume", box}, {"hit_fraction", acc.mean()}};
    return r;
}

EstimateReport body_volume(const ConvexBody& body, std::int64_t samples, std::uint64_t seed, int workers) {
    Vec lo = body.lower(), hi = body.upper();
    double box = (hi - lo).prod();
    const int n = body.dim();
    auto acc = sample_mean(samples, seed, workers, [&](Rng& rng, std::int64_t) {
        thread_local Vec x;
        x.resize(n);
        for (int i = 0; i < n; ++i) x[i] = rng.uniform(lo[i], hi[i]);
        return body.contains(x) ? 1.0 : 0.0;
    });
    EstimateReport r;
    r.value = box * acc.mean();
    r.std_error = box * acc.std_error();
    r.samples = samples;
    r.seed = seed;
    r.method = "volume_box_mc";
    return r;
}

ProfileCheck section_profile_logconcavity_check(const ConvexBody& body, const Mat& frame, const Vec& direction,
                                                const std::vector<double>& grid, std::int64_t samples,
                                                std::uint64_t seed, int workers) {
    if (!body.symmetric()) throw UsageError("profile check: body must be centrally symmetric");
    check_frame(frame, body.dim());
    ProfileCheck out;
    out.offsets = grid;
    if (grid.empty()) {
        out.pass = true;
        return out;
    }
    Vec v = direction - frame * (frame.transpose() * direction);
    if (v.norm() < 1e-12) throw UsageError("profile check: direction lies in the section plane");
    v.normalize();
    // Common random numbers: every offset uses the same stream.
    for (double s : grid) out.values.push_back(central_section_volume(body, frame, samples, seed, workers, s * v));
    auto sigma = [&](std::size_t a, std::size_t b) {
        return 3.0 * std::hypot(out.values[a].std_error, out.values[b].std_error);
    };
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(grid[a]) < std::abs(grid[b]);
    });
    out.pass = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < grid.size(); ++j) {
            // Same-side pairs must decrease outward; everything is below the centre value.
            bool same_side = grid[i] * grid[j] >= 0;
            bool outward = std::abs(grid[j]) > std::abs(grid[i]);
            if ((same_side && outward) || grid[i] == 0.0) {
                if (out.values[j].value > out.values[i].value + sigma(i, j)) {
                    out.pass = false;
                    out.failure = "profile increases from s=" + std::to_string(grid[i]) + " to s=" + std::to_string(grid[j]);
                    return out;
                }
            }
        }
    }
    return out;
}

SectionSearch min_section_search(const ConvexBody& body, int k, int restarts, std::int64_t samples,
                                 std::uint64_t seed, int workers) {
    const int n = body.dim();
    if (!body.symmetric()) throw UsageError("min_section_search: body must be centrally symmetric");
    if (k < 1 || k >= n) throw UsageError("min_section_search: need 1 <= k < n");
    if (restarts < 1) throw UsageError("min_section_search: restarts must be positive");
    const int m = n - k;
    SectionSearch out;
    auto vol = body_volume(body, 1 << 19, splitmix64(seed ^ 0x766f6cULL), workers);
    out.scale = std::pow(ball_volume(n) / vol.value, 1.0 / n);
    out.normalization_error = static_cast<double>(m) / n * vol.std_error / vol.value;
    ConvexBody K = body.scaled(out.scale);
    out.bound = ball_volume(m);

    const std::int64_t search_samples = std::max<std::int64_t>(samples / 4, 4096);
    const std::uint64_t crn = splitmix64(seed ^ 0x5ec7ULL);
    auto objective = [&](const Mat& f) { return central_section_volume(K, f, search_samples, crn, workers).value; };
    Rng rng(splitmix64(seed + 17));
    Mat best_frame;
    double best_value = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Mat frame = random_frame(n, m, rng);
        double value = objective(frame);
        if (r == 0) out.start = central_section_volume(K, frame, samples, splitmix64(seed + 1), workers);
        double eta = 0.5;
        for (int round = 0; round < 20; ++round, eta *= 0.8) {
            for (int trial = 0; trial < 3; ++trial) {
                Mat noise(n, m);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < m; ++j) noise(i, j) = rng.normal();
                Mat cand = orthonormalize(frame + eta * noise);
                double cv = objective(cand);
                if (cv < value) {
                    value = cv;
                    frame = cand;
                }
            }
        }
        if (value < best_value) {
            best_value = value;
            best_frame = frame;
        }
    }
    out.frame = best_frame;
    out.best = central_section_volume(K, best_frame, samples, splitmix64(seed + 2), workers);
    out.best.diagnostics.emplace_back("scale", out.scale);
    out.best.diagnostics.emplace_back("normalization_error", out.normalization_error);
    double margin = out.bound * 3.0 * out.normalization_error + 3.0 * out.best.std_error;
    out.pass = out.best.value <= out.bound + margin;
    return out;
}

}  // namespace waistlab
