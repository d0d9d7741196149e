#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "waistlab/errors.hpp"
#include "waistlab/linalg.hpp"
#include "waistlab/spaces.hpp"

using namespace waistlab;

namespace {

constexpr double kPi = std::numbers::pi;

// v_0 = 1, v_1 = 2, v_k = (2 pi / k) v_{k-2}.
double recursive_ball_volume(int k) {
    if (k == 0) return 1.0;
    if (k == 1) return 2.0;
    return 2.0 * kPi / k * recursive_ball_volume(k - 2);
}

}  // namespace

TEST(Volumes, BallMatchesRecursion) {
    for (int k = 0; k <= 16; ++k) EXPECT_NEAR(ball_volume(k), recursive_ball_volume(k), 1e-12 * recursive_ball_volume(k));
}

TEST(Volumes, LowDimensionalSpheres) {
    EXPECT_NEAR(sphere_volume(0), 2.0, 1e-12);
    EXPECT_NEAR(sphere_volume(1), 2 * kPi, 1e-12);
    EXPECT_NEAR(sphere_volume(2), 4 * kPi, 1e-12);
    EXPECT_NEAR(sphere_volume(3), 2 * kPi * kPi, 1e-12);
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(sphere_volume(i), (i + 1) * recursive_ball_volume(i + 1), 1e-10);
}

TEST(Volumes, Descriptors) {
    EXPECT_NEAR(SpaceDescriptor::real_projective(3).volume(), kPi * kPi, 1e-12);
    EXPECT_NEAR(SpaceDescriptor::real_projective(2).volume(), 2 * kPi, 1e-12);
    // CP^n has volume pi^n / n! in the metric where Hopf circles have length 2 pi.
    EXPECT_NEAR(SpaceDescriptor::complex_projective(1).volume(), kPi, 1e-12);
    EXPECT_NEAR(SpaceDescriptor::complex_projective(3).volume(), kPi * kPi * kPi / 6, 1e-12);
    EXPECT_NEAR(SpaceDescriptor::torus({1, 2, 3}).volume(), 6.0, 1e-15);
    EXPECT_NEAR(SpaceDescriptor::cube(3, 0.5).volume(), 0.125, 1e-15);
}

TEST(Distances, ProjectiveQuotient) {
    auto sp = SpaceDescriptor::sphere(2);
    auto rp = SpaceDescriptor::real_projective(2);
    Vec a(3), b(3);
    a << 1, 0, 0;
    for (double th : {0.1, 1.0, 1.5, 2.0, 3.0}) {
        b << std::cos(th), std::sin(th), 0;
        EXPECT_NEAR(geodesic_distance(sp, a, b), th, 1e-12);
        EXPECT_NEAR(geodesic_distance(rp, a, b), std::min(th, kPi - th), 1e-12);
        EXPECT_NEAR(geodesic_distance(rp, a, Vec(-b)), std::min(th, kPi - th), 1e-12);
    }
}

TEST(Distances, ComplexProjectiveIsDistanceBetweenHopfCircles) {
    auto cp = SpaceDescriptor::complex_projective(1);
    Vec a(4), b(4);
    a << 1, 0, 0, 0;
    // b lies on a Hopf circle at angle th from the circle of a.
    for (double th : {0.2, 0.7, 1.3}) {
        b << std::cos(th), 0, std::sin(th), 0;
        EXPECT_NEAR(geodesic_distance(cp, a, b), th, 1e-9);
        // Rotating b along its own circle (multiplication by e^{i phi}) changes nothing.
        double phi = 0.9;
        Vec c(4);
        c << std::cos(th) * std::cos(phi), std::cos(th) * std::sin(phi), std::sin(th) * std::cos(phi),
            std::sin(th) * std::sin(phi);
        EXPECT_NEAR(geodesic_distance(cp, a, c), th, 1e-9);
    }
}

TEST(Distances, FlatTorusWraps) {
    auto t = SpaceDescriptor::torus({1.0, 2.0});
    Vec p(2), q(2);
    p << 0.05, 0.1;
    q << 0.95, 1.9;
    EXPECT_NEAR(geodesic_distance(t, p, q), std::hypot(0.1, 0.2), 1e-12);
    Vec r = reduce_torus(t, Vec::Constant(2, -0.25));
    EXPECT_NEAR(r[0], 0.75, 1e-15);
    EXPECT_NEAR(r[1], 1.75, 1e-15);
}

TEST(Canonicalize, FirstNonzeroPositive) {
    Vec p(3);
    p << 0, -0.6, 0.8;
    Vec c = canonicalize_projective(p);
    EXPECT_GT(c[1], 0);
    EXPECT_EQ(canonicalize_projective(c), c);
}

TEST(Sampling, SpherePointsAreUnitAndCentred) {
    Rng rng(1);
    auto s = SpaceDescriptor::sphere(4);
    Vec mean = Vec::Zero(5);
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        Vec p = sample_uniform(s, rng);
        ASSERT_NEAR(p.norm(), 1.0, 1e-12);
        mean += p;
    }
    mean /= n;
    EXPECT_LT(mean.norm(), 0.03);
}

TEST(Sampling, BallRadiusLaw) {
    // P(|x| < 1/2) = 2^{-n} in the unit ball.
    Rng rng(2);
    auto b = SpaceDescriptor::ball(3);
    int inside = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        Vec p = sample_uniform(b, rng);
        ASSERT_LE(p.norm(), 1.0);
        inside += p.norm() < 0.5;
    }
    EXPECT_NEAR(static_cast<double>(inside) / n, 0.125, 0.006);
}

TEST(Sampling, ProjectivePointsCanonical) {
    Rng rng(3);
    auto rp = SpaceDescriptor::real_projective(3);
    for (int i = 0; i < 100; ++i) {
        Vec p = sample_uniform(rp, rng);
        EXPECT_EQ(canonicalize_projective(p), p);
    }
}

TEST(Linalg, RandomFrameOrthonormal) {
    Rng rng(4);
    for (int n = 2; n <= 7; ++n)
        for (int k = 1; k <= n; ++k) {
            Mat f = random_frame(n, k, rng);
            EXPECT_EQ(f.rows(), n);
            EXPECT_EQ(f.cols(), k);
            EXPECT_TRUE(is_orthonormal(f));
            if (k < n) {
                Mat c = orthogonal_complement(f);
                EXPECT_EQ(c.cols(), n - k);
                EXPECT_LT((f.transpose() * c).norm(), 1e-12);
            }
        }
}

TEST(Linalg, HaarFrameProjectionLaw) {
    // First coordinate of a Haar unit vector in R^3 is uniform on [-1, 1].
    Rng rng(5);
    int below = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) below += random_frame(3, 1, rng)(0, 0) < -0.5;
    EXPECT_NEAR(static_cast<double>(below) / n, 0.25, 0.008);
}

TEST(Linalg, GramVolume) {
    Mat a(3, 2);
    a << 1, 0, 0, 2, 0, 0;
    EXPECT_NEAR(gram_volume(a), 2.0, 1e-15);
    a << 1, 1, 0, 1, 0, 0;
    EXPECT_NEAR(gram_volume(a), 1.0, 1e-15);
}
