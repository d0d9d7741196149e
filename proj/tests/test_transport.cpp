#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "waistlab/errors.hpp"
#include "waistlab/linalg.hpp"
#include "waistlab/rng.hpp"
#include "waistlab/spaces.hpp"
#include "waistlab/transport.hpp"

using namespace waistlab;

namespace {

constexpr double kPi = std::numbers::pi;

double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    double h = (b - a) / n, s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
}

Vec gaussian_point(int n, Rng& rng) { return rng.normal_vector(n) / std::sqrt(2 * kPi); }

}  // namespace

TEST(Transport, IntervalMatchesQuadrature) {
    for (double x : {-2.0, -0.3, 0.0, 0.1, 0.5, 1.7}) {
        double ref = simpson([](double s) { return std::exp(-kPi * s * s); }, 0.0, x);
        EXPECT_NEAR(gauss_to_interval(x), ref, 1e-10);
    }
    EXPECT_NEAR(gauss_to_interval(50.0), 0.5, 1e-15);
    EXPECT_EQ(gauss_to_interval(std::numeric_limits<double>::infinity()), 0.5);
    EXPECT_THROW(gauss_to_interval(std::nan("")), DomainError);
}

TEST(Transport, PlanarRadialClosedForm) {
    // n = 2: y^2 = (1 - exp(-pi x^2)) / pi.
    for (double x : {0.01, 0.2, 0.7, 1.5, 3.0})
        EXPECT_NEAR(gauss_to_ball_radial(x, 2), std::sqrt((1 - std::exp(-kPi * x * x)) / kPi), 1e-12);
    // Saturates at the radius of the unit-volume ball.
    for (int n : {1, 2, 3, 5}) EXPECT_NEAR(gauss_to_ball_radial(20.0, n), std::pow(ball_volume(n), -1.0 / n), 1e-10);
}

TEST(Transport, RadialInverse) {
    for (int n : {1, 2, 3, 5})
        for (double x : {0.05, 0.4, 0.9, 1.3}) {
            double y = gauss_to_ball_radial(x, n);
            EXPECT_NEAR(ball_to_gauss_radial(y, n), x, 1e-7) << "n=" << n;
        }
    EXPECT_THROW(ball_to_gauss_radial(10.0, 2), DomainError);
}

TEST(Transport, BallPushforwardIsUniform) {
    // P(|T(g)| < R/2) = 2^{-n} for the uniform measure on the ball of radius R.
    Rng rng(3);
    for (int n : {2, 3}) {
        TransportMap t = TransportMap::gauss_to_ball(n);
        const double R = std::pow(ball_volume(n), -1.0 / n);
        int inner = 0;
        const int N = 20000;
        for (int i = 0; i < N; ++i) {
            Vec y = t.apply(gaussian_point(n, rng));
            ASSERT_LE(y.norm(), R + 1e-12);
            inner += y.norm() < 0.5 * R;
        }
        double expect = std::pow(0.5, n);
        EXPECT_NEAR(static_cast<double>(inner) / N, expect, 4 * std::sqrt(expect * (1 - expect) / N));
    }
}

TEST(Transport, JacobianMatchesFiniteDifferences) {
    Rng rng(4);
    for (const auto& map : builtin_maps()) {
        if (!map.gaussian_domain()) continue;
        Vec p = gaussian_point(map.domain_dim(), rng);
        Mat j = map.jacobian(p);
        const double h = 1e-5;
        for (int c = 0; c < map.domain_dim(); ++c) {
            Vec a = p, b = p;
            a[c] += h;
            b[c] -= h;
            Vec fd = (map.apply(a) - map.apply(b)) / (2 * h);
            EXPECT_LT((fd - j.col(c)).norm(), 1e-5) << map.name();
        }
    }
}

TEST(Transport, LipschitzAndDeterminantProperty) {
    Rng rng(5);
    for (const auto& map : builtin_maps()) {
        for (int i = 0; i < 200; ++i) {
            Vec p = map.gaussian_domain() ? gaussian_point(map.domain_dim(), rng)
                                          : sample_uniform(SpaceDescriptor::sphere(map.domain_dim() - 1), rng);
            auto spec = jacobian_singular_values(map, p);
            ASSERT_LE(spec.singular_values[0], 1.0 + 1e-6) << map.name();
            if (!map.gaussian_domain()) continue;
            int k = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(map.domain_dim())));
            Mat frame = random_frame(map.domain_dim(), k, rng);
            ASSERT_GE(restricted_determinant(map, p, frame), gaussian_density(p) * (1 - 1e-6)) << map.name();
        }
    }
}

TEST(Transport, IntervalDeterminantIsExactlyRho) {
    TransportMap t = TransportMap::gauss_to_interval();
    for (double x : {-1.0, 0.0, 0.4})
        EXPECT_NEAR(restricted_determinant(t, Vec::Constant(1, x), Mat::Identity(1, 1)), std::exp(-kPi * x * x), 1e-15);
}

TEST(Transport, ArchimedesProjectionDropsCoordinates) {
    TransportMap a = TransportMap::archimedes_projection(2, 1);
    Vec p(4);
    p << 0.5, 0.5, 0.5, 0.5;
    Vec y = a.apply(p);
    ASSERT_EQ(y.size(), 2);
    EXPECT_DOUBLE_EQ(y[0], 0.5);
    EXPECT_DOUBLE_EQ(y[1], 0.5);
    Vec off(4);
    off << 1, 1, 0, 0;
    EXPECT_THROW(a.apply(off), DomainError);
}

TEST(Transport, MuDensityValues) {
    // Archimedes: projecting S^2 to a diameter gives the constant density 2 pi.
    for (double x : {-0.9, 0.0, 0.5}) EXPECT_NEAR(density_mu_m(1, 1, Vec::Constant(1, x)), 2 * kPi, 1e-12);
    // S^{n+2} -> B^n: density s_2 sqrt(1 - |x|^2).
    Vec x(2);
    x << 0.3, 0.4;
    EXPECT_NEAR(density_mu_m(2, 2, x), 4 * kPi * std::sqrt(0.75), 1e-12);
    EXPECT_THROW(density_mu_m(1, 1, Vec::Constant(1, 1.5)), DomainError);
}

TEST(Transport, MuMassIsSphereVolume) {
    for (int m : {1, 2, 3}) {
        double mass = simpson([m](double r) { return density_mu_m(1, m, Vec::Constant(1, r)); }, -1.0, 1.0, 20000);
        EXPECT_NEAR(mass, sphere_volume(1 + m), 1e-3 * sphere_volume(1 + m)) << "m=" << m;
    }
}

TEST(Transport, RhoIncreasesToGaussian) {
    Rng rng(6);
    for (int i = 0; i < 50; ++i) {
        Vec y = rng.normal_vector(3) * 0.5;
        double prev = 0.0;
        for (int m : {2, 5, 10, 100, 1000, 100000}) {
            double v = density_rho_m(m, y);
            EXPECT_GE(v, prev - 1e-15);
            prev = v;
        }
        EXPECT_LE(prev, gaussian_density(y) + 1e-15);
        EXPECT_NEAR(prev, gaussian_density(y), 1e-3);
    }
}

TEST(Transport, ProductStacksBlocks) {
    auto prod = TransportMap::product({TransportMap::gauss_to_interval(), TransportMap::gauss_to_ball(2)});
    EXPECT_EQ(prod.domain_dim(), 3);
    EXPECT_EQ(prod.codomain_dim(), 3);
    Vec p(3);
    p << 0.2, 0.3, -0.1;
    Vec y = prod.apply(p);
    EXPECT_NEAR(y[0], gauss_to_interval(0.2), 1e-15);
    Vec tail = TransportMap::gauss_to_ball(2).apply(p.tail(2));
    EXPECT_NEAR((y.tail(2) - tail).norm(), 0.0, 1e-15);
    EXPECT_THROW(prod.apply(Vec::Zero(2)), UsageError);
}
