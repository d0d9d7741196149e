#include "waistlab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "waistlab/errors.hpp"

namespace waistlab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kRejectionCap = 1000000;
}  // namespace

double ball_volume(int k) {
    if (k < 0) throw DomainError("ball_volume: negative dimension");
    return std::pow(kPi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

double sphere_volume(int i) {
    if (i < 0) throw DomainError("sphere_volume: negative dimension");
    return (i + 1) * ball_volume(i + 1);
}

std::string to_string(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::Sphere: return "sphere";
        case SpaceKind::Ball: return "ball";
        case SpaceKind::Cube: return "cube";
        case SpaceKind::Torus: return "torus";
        case SpaceKind::RealProjective: return "real_projective";
        case SpaceKind::ComplexProjective: return "complex_projective";
        case SpaceKind::ConvexBody: return "convex_body";
    }
    return "unknown";
}

SpaceDescriptor SpaceDescriptor::sphere(int n) {
    if (n < 1) throw DomainError("sphere: dimension must be >= 1");
    return {SpaceKind::Sphere, n, n + 1, {}, nullptr};
}

SpaceDescriptor SpaceDescriptor::ball(int n) {
    if (n < 1) throw DomainError("ball: dimension must be >= 1");
    return {SpaceKind::Ball, n, n, {}, nullptr};
}

SpaceDescriptor SpaceDescriptor::cube(int n, double side) {
    return cube(std::vector<double>(static_cast<std::size_t>(std::max(n, 0)), side));
}

SpaceDescriptor SpaceDescriptor::cube(std::vector<double> sides) {
    if (sides.empty()) throw DomainError("cube: dimension must be >= 1");
    for (double s : sides)
        if (!(s > 0)) throw DomainError("cube: side lengths must be positive");
    int n = static_cast<int>(sides.size());
    return {SpaceKind::Cube, n, n, std::move(sides), nullptr};
}

SpaceDescriptor SpaceDescriptor::torus(std::vector<double> lattice) {
    if (lattice.empty()) throw DomainError("torus: dimension must be >= 1");
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        if (!(lattice[i] > 0)) throw DomainError("torus: lattice lengths must be positive");
        if (i > 0 && lattice[i] < lattice[i - 1])
            throw DomainError("torus: lattice lengths must be sorted ascending");
    }
    int n = static_cast<int>(lattice.size());
    return {SpaceKind::Torus, n, n, std::move(lattice), nullptr};
}

SpaceDescriptor SpaceDescriptor::real_projective(int n) {
    if (n < 1) throw DomainError("real_projective: dimension must be >= 1");
    return {SpaceKind::RealProjective, n, n + 1, {}, nullptr};
}

SpaceDescriptor SpaceDescriptor::complex_projective(int n) {
    if (n < 1) throw DomainError("complex_projective: dimension must be >= 1");
    return {SpaceKind::ComplexProjective, 2 * n, 2 * n + 2, {}, nullptr};
}

SpaceDescriptor SpaceDescriptor::convex_body(int n, std::shared_ptr<const BodyHandle> body) {
    if (n < 1) throw DomainError("convex_body: dimension must be >= 1");
    if (!body) throw UsageError("convex_body: missing body handle");
    return {SpaceKind::ConvexBody, n, n, {}, std::move(body)};
}

double SpaceDescriptor::volume() const {
    switch (kind) {
        case SpaceKind::Sphere: return sphere_volume(intrinsic_dim);
        case SpaceKind::Ball: return ball_volume(intrinsic_dim);
        case SpaceKind::Cube:
        case SpaceKind::Torus: {
            double v = 1.0;
            for (double a : lengths) v *= a;
            return v;
        }
        case SpaceKind::RealProjective: return 0.5 * sphere_volume(intrinsic_dim);
        case SpaceKind::ComplexProjective:
            // Hopf submersion S^{2n+1} -> CP^n with great-circle fibres of length 2 pi.
            return sphere_volume(intrinsic_dim + 1) / (2.0 * kPi);
        case SpaceKind::ConvexBody: break;
    }
    throw UsageError("volume: not available for convex-body spaces");
}

Vec canonicalize_projective(const Vec& p) {
    for (int i = 0; i < p.size(); ++i) {
        if (std::abs(p[i]) > kExactTol) return p[i] < 0 ? Vec(-p) : p;
    }
    return p;
}

Vec reduce_torus(const SpaceDescriptor& space, const Vec& p) {
    Vec r = p;
    for (int i = 0; i < r.size(); ++i) {
        double a = space.lengths[static_cast<std::size_t>(i)];
        r[i] = r[i] - a * std::floor(r[i] / a);
        if (r[i] >= a) r[i] -= a;
    }
    return r;
}

namespace {

double sphere_angle(const Vec& p, const Vec& q) {
    // Stable for nearly equal and nearly antipodal points.
    return 2.0 * std::atan2((p - q).norm(), (p + q).norm());
}

}  // namespace

double geodesic_distance(const SpaceDescriptor& space, const Vec& p, const Vec& q) {
    if (p.size() != space.ambient_dim || q.size() != space.ambient_dim)
        throw UsageError("geodesic_distance: point dimension does not match the space");
    switch (space.kind) {
        case SpaceKind::Sphere: return sphere_angle(p, q);
        case SpaceKind::RealProjective: {
            double d = sphere_angle(p, q);
            return std::min(d, kPi - d);
        }
        case SpaceKind::ComplexProjective: {
            // Distance between Hopf circles: arccos |<p, q>_C|.
            const int m = space.ambient_dim / 2;
            double re = 0.0, im = 0.0;
            for (int j = 0; j < m; ++j) {
                double a = p[2 * j], b = p[2 * j + 1], c = q[2 * j], d = q[2 * j + 1];
                re += a * c + b * d;
                im += a * d - b * c;
            }
            double h = std::min(1.0, std::hypot(re, im));
            double s = std::sqrt(std::max(0.0, 1.0 - h * h));
            return std::atan2(s, h);
        }
        case SpaceKind::Torus: {
            double sum = 0.0;
            for (int i = 0; i < p.size(); ++i) {
                double a = space.lengths[static_cast<std::size_t>(i)];
                double d = std::fmod(std::abs(p[i] - q[i]), a);
                d = std::min(d, a - d);
                sum += d * d;
            }
            return std::sqrt(sum);
        }
        default: return (p - q).norm();
    }
}

Vec sample_uniform(const SpaceDescriptor& space, Rng& rng) {
    const int n = space.ambient_dim;
    switch (space.kind) {
        case SpaceKind::Sphere:
        case SpaceKind::ComplexProjective: {
            Vec g;
            double r = 0.0;
            do {
                g = rng.normal_vector(n);
                r = g.norm();
            } while (r == 0.0);
            return g / r;
        }
        case SpaceKind::RealProjective: {
            Vec g;
            double r = 0.0;
            do {
                g = rng.normal_vector(n);
                r = g.norm();
            } while (r == 0.0);
            return canonicalize_projective(g / r);
        }
        case SpaceKind::Ball: {
            Vec g;
            double r = 0.0;
            do {
                g = rng.normal_vector(n);
                r = g.norm();
            } while (r == 0.0);
            return g / r * std::pow(rng.uniform(), 1.0 / n);
        }
        case SpaceKind::Cube:
        case SpaceKind::Torus: {
            Vec x(n);
            for (int i = 0; i < n; ++i) x[i] = space.lengths[static_cast<std::size_t>(i)] * rng.uniform();
            return x;
        }
        case SpaceKind::ConvexBody: {
            const auto& b = *space.body;
            Vec x(n);
            for (int attempt = 1; attempt <= kRejectionCap; ++attempt) {
                for (int i = 0; i < n; ++i) x[i] = rng.uniform(b.lower[i], b.upper[i]);
                if (b.contains(x)) return x;
            }
            throw SamplingFailure("sample_uniform: rejection cap exceeded", 1.0 / kRejectionCap);
        }
    }
    throw UsageError("sample_uniform: unsupported space");
}

}  // namespace waistlab
