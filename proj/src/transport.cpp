#include "waistlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "waistlab/errors.hpp"
#include "waistlab/spaces.hpp"

namespace waistlab {

namespace {

constexpr double kPi = std::numbers::pi;
// exp(-pi * 8^2) underflows relative to double precision of 1/2.
constexpr double kGaussCutoff = 8.0;
constexpr double kFdStep = 1e-6;

// n int_0^x r^{n-1} exp(-pi r^2) dr
double radial_mass(double x, int n) {
    double upper = std::min(x, kGaussCutoff);
    return 0.5 * n * std::pow(kPi, -0.5 * n) * boost::math::tgamma_lower(0.5 * n, kPi * upper * upper);
}

}  // namespace

double gauss_to_interval(double x) {
    if (!std::isfinite(x)) {
        if (std::isnan(x)) throw DomainError("gauss_to_interval: NaN input");
        return x > 0 ? 0.5 : -0.5;
    }
    double a = std::min(std::abs(x), kGaussCutoff);
    double v = 0.5 * std::erf(std::sqrt(kPi) * a);
    return x < 0 ? -v : v;
}

double gauss_to_ball_radial(double x, int n) {
    if (n <= 0) throw DomainError("gauss_to_ball_radial: n must be >= 1");
    if (x < 0) throw DomainError("gauss_to_ball_radial: x must be >= 0");
    if (x == 0) return 0.0;
    return std::pow(radial_mass(x, n), 1.0 / n);
}

double ball_to_gauss_radial(double y, int n) {
    if (n <= 0) throw DomainError("ball_to_gauss_radial: n must be >= 1");
    double ymax = std::pow(ball_volume(n), -1.0 / n);
    if (y < 0 || y >= ymax) throw DomainError("ball_to_gauss_radial: y outside the unit-volume ball");
    if (y == 0) return 0.0;
    // y(x) <= x, so the solution lies in [y, X] for X large enough.
    double hi = std::max(1.0, 2.0 * y);
    while (gauss_to_ball_radial(hi, n) < y && hi < kGaussCutoff) hi *= 2.0;
    auto f = [&](double x) { return gauss_to_ball_radial(x, n) - y; };
    auto tol = [](double a, double b) { return std::abs(b - a) < 1e-6; };
    auto bracket = boost::math::tools::bisect(f, y, hi, tol);
    double guess = 0.5 * (bracket.first + bracket.second);
    auto newton = [&](double x) {
        double yx = gauss_to_ball_radial(x, n);
        double d = std::pow(x, n - 1) * std::exp(-kPi * x * x) / std::pow(yx, n - 1);
        return std::make_pair(yx - y, d);
    };
    return boost::math::tools::newton_raphson_iterate(newton, guess, bracket.first, bracket.second, 50);
}

TransportMap TransportMap::gauss_to_interval() {
    TransportMap m;
    m.kind_ = MapKind::GaussToInterval;
    return m;
}

TransportMap TransportMap::gauss_to_ball(int n) {
    if (n <= 0) throw DomainError("gauss_to_ball: n must be >= 1");
    TransportMap m;
    m.kind_ = MapKind::GaussToBall;
    m.n_ = n;
    m.domain_dim_ = m.codomain_dim_ = n;
    return m;
}

TransportMap TransportMap::product(std::vector<TransportMap> blocks) {
    if (blocks.empty()) throw UsageError("product: no blocks");
    TransportMap m;
    m.kind_ = MapKind::Product;
    m.domain_dim_ = m.codomain_dim_ = 0;
    for (const auto& b : blocks) {
        if (b.kind_ == MapKind::ArchimedesProjection)
            throw UsageError("product: sphere-domain blocks are not supported");
        m.domain_dim_ += b.domain_dim_;
        m.codomain_dim_ += b.codomain_dim_;
    }
    m.blocks_ = std::move(blocks);
    return m;
}

TransportMap TransportMap::coordinate_scale(int dim, double factor) {
    if (dim <= 0) throw DomainError("coordinate_scale: dim must be >= 1");
    TransportMap m;
    m.kind_ = MapKind::CoordinateScale;
    m.domain_dim_ = m.codomain_dim_ = dim;
    m.factor_ = factor;
    return m;
}

TransportMap TransportMap::archimedes_projection(int n, int m) {
    if (n <= 0 || m <= 0) throw DomainError("archimedes_projection: n, m must be >= 1");
    TransportMap t;
    t.kind_ = MapKind::ArchimedesProjection;
    t.n_ = n;
    t.m_ = m;
    t.domain_dim_ = n + m + 1;
    t.codomain_dim_ = n;
    return t;
}

TransportMap TransportMap::cube_transport(int n) {
    return product(std::vector<TransportMap>(static_cast<std::size_t>(n), gauss_to_interval()));
}

int TransportMap::tangent_dim() const {
    return kind_ == MapKind::ArchimedesProjection ? domain_dim_ - 1 : domain_dim_;
}

bool TransportMap::gaussian_domain() const {
    switch (kind_) {
        case MapKind::GaussToInterval:
        case MapKind::GaussToBall: return true;
        case MapKind::Product:
            return std::all_of(blocks_.begin(), blocks_.end(),
                               [](const TransportMap& b) { return b.gaussian_domain(); });
        default: return false;
    }
}

std::string TransportMap::name() const {
    switch (kind_) {
        case MapKind::GaussToInterval: return "gauss_to_interval";
        case MapKind::GaussToBall: return "gauss_to_ball(" + std::to_string(n_) + ")";
        case MapKind::CoordinateScale:
            return "coordinate_scale(" + std::to_string(domain_dim_) + "," + std::to_string(factor_) + ")";
        case MapKind::ArchimedesProjection:
            return "archimedes_projection(" + std::to_string(n_) + "," + std::to_string(m_) + ")";
        case MapKind::Product: {
            std::string s = "product(";
            for (std::size_t i = 0; i < blocks_.size(); ++i) s += (i ? "," : "") + blocks_[i].name();
            return s + ")";
        }
    }
    return "unknown";
}

Vec TransportMap::apply(const Vec& p) const {
    if (p.size() != domain_dim_) throw UsageError("apply: point dimension mismatch");
    switch (kind_) {
        case MapKind::GaussToInterval: return Vec::Constant(1, waistlab::gauss_to_interval(p[0]));
        case MapKind::GaussToBall: {
            double r = p.norm();
            if (r == 0) return Vec::Zero(n_);
            return p * (gauss_to_ball_radial(r, n_) / r);
        }
        case MapKind::CoordinateScale: return factor_ * p;
        case MapKind::ArchimedesProjection: {
            if (std::abs(p.norm() - 1.0) > kGeomTol)
                throw DomainError("archimedes_projection: point not on the unit sphere");
            return p.head(n_);
        }
        case MapKind::Product: {
            Vec out(codomain_dim_);
            int in = 0, o = 0;
            for (const auto& b : blocks_) {
                out.segment(o, b.codomain_dim_) = b.apply(p.segment(in, b.domain_dim_));
                in += b.domain_dim_;
                o += b.codomain_dim_;
            }
            return out;
        }
    }
    return p;
}

Mat TransportMap::tangent_basis(const Vec& p) const {
    if (kind_ == MapKind::ArchimedesProjection) return orthogonal_complement(p);
    return Mat::Identity(domain_dim_, domain_dim_);
}

Mat TransportMap::jacobian(const Vec& p) const {
    if (p.size() != domain_dim_) throw UsageError("jacobian: point dimension mismatch");
    switch (kind_) {
        case MapKind::GaussToInterval: return Mat::Constant(1, 1, std::exp(-kPi * p[0] * p[0]));
        case MapKind::CoordinateScale: return factor_ * Mat::Identity(domain_dim_, domain_dim_);
        case MapKind::ArchimedesProjection: {
            Mat t = tangent_basis(p);
            return t.topRows(n_);
        }
        case MapKind::GaussToBall: {
            if (p.norm() < 2 * kFdStep) {
                // y(x) = x + O(x^3) near the origin: the limit is the identity.
                return Mat::Identity(n_, n_);
            }
            Mat j(n_, n_);
            for (int c = 0; c < n_; ++c) {
                Vec a = p, b = p;
                a[c] += kFdStep;
                b[c] -= kFdStep;
                j.col(c) = (apply(a) - apply(b)) / (2 * kFdStep);
            }
            return j;
        }
        case MapKind::Product: {
            Mat j = Mat::Zero(codomain_dim_, domain_dim_);
            int in = 0, o = 0;
            for (const auto& b : blocks_) {
                j.block(o, in, b.codomain_dim_, b.domain_dim_) = b.jacobian(p.segment(in, b.domain_dim_));
                in += b.domain_dim_;
                o += b.codomain_dim_;
            }
            return j;
        }
    }
    return Mat();
}

JacobianSpectrum jacobian_singular_values(const TransportMap& map, const Vec& p) {
    Eigen::JacobiSVD<Mat> svd(map.jacobian(p));
    return {svd.singularValues(), p};
}

double restricted_determinant(const TransportMap& map, const Vec& p, const Mat& frame) {
    if (frame.rows() != map.domain_dim()) throw UsageError("restricted_determinant: frame dimension mismatch");
    if (!is_orthonormal(frame)) throw UsageError("restricted_determinant: frame is not orthonormal");
    Mat basis = map.tangent_basis(p);
    if (map.kind() == MapKind::ArchimedesProjection && (p.transpose() * frame).cwiseAbs().maxCoeff() > kGeomTol)
        throw UsageError("restricted_determinant: frame not tangent to the sphere");
    // Differential in ambient coordinates, then restricted to the frame.
    Mat d = map.jacobian(p) * basis.transpose();
    return gram_volume(d * frame);
}

std::vector<TransportMap> builtin_maps() {
    using T = TransportMap;
    return {
        T::gauss_to_interval(),
        T::cube_transport(2),
        T::cube_transport(4),
        T::gauss_to_ball(2),
        T::gauss_to_ball(3),
        T::gauss_to_ball(5),
        T::product({T::gauss_to_ball(2), T::gauss_to_ball(3)}),
        T::product({T::gauss_to_interval(), T::gauss_to_ball(2)}),
        T::coordinate_scale(3, 0.5),
        T::archimedes_projection(1, 1),
        T::archimedes_projection(2, 1),
        T::archimedes_projection(1, 2),
        T::archimedes_projection(3, 2),
    };
}

double density_mu_m(int n, int m, const Vec& x) {
    if (m < 1) throw DomainError("density_mu_m: m must be >= 1");
    if (x.size() != n) throw UsageError("density_mu_m: point dimension mismatch");
    double r2 = x.squaredNorm();
    if (r2 > 1.0 + kExactTol) throw DomainError("density_mu_m: point outside the unit ball");
    return sphere_volume(m) * std::pow(std::max(0.0, 1.0 - r2), 0.5 * (m - 1));
}

double density_rho_m(int m, const Vec& y) {
    if (m < 2) throw DomainError("density_rho_m: m must be >= 2");
    double r2 = y.squaredNorm();
    double edge = (m - 1) / (2.0 * kPi);
    if (r2 >= edge) return 0.0;
    return std::pow(1.0 - r2 / edge, 0.5 * (m - 1));
}

double gaussian_density(const Vec& p) { return std::exp(-kPi * p.squaredNorm()); }

}  // namespace waistlab
