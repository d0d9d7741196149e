#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "waistlab/convex.hpp"
#include "waistlab/errors.hpp"
#include "waistlab/linalg.hpp"
#include "waistlab/rng.hpp"
#include "waistlab/spaces.hpp"

using namespace waistlab;

namespace {

constexpr double kPi = std::numbers::pi;

Vec random_unit(int n, Rng& rng) {
    Vec v = rng.normal_vector(n);
    return v / v.norm();
}

// Volume of the unit p-ball in R^n.
double p_ball_volume(int n, double p) {
    return std::pow(2 * std::tgamma(1 + 1 / p), n) / std::tgamma(1 + n / p);
}

std::vector<ConvexBody> sample_bodies() {
    Vec half(3);
    half << 0.5, 1.0, 1.5;
    return {ConvexBody::cube(3), ConvexBody::cross_polytope(3), ConvexBody::p_ball(3, 2.0),
            ConvexBody::p_ball(3, 4.0), ConvexBody::box(half), ConvexBody::product_of_balls({2, 1})};
}

}  // namespace

TEST(Support, PBallSupportIsTheDualNorm) {
    Rng rng(1);
    auto l2 = ConvexBody::p_ball(4, 2.0);
    auto linf = ConvexBody::p_ball(4, INFINITY);
    auto l1 = ConvexBody::p_ball(4, 1.0);
    auto l3 = ConvexBody::p_ball(4, 3.0);
    for (int i = 0; i < 20; ++i) {
        Vec u = random_unit(4, rng);
        EXPECT_NEAR(l2.support(u), 1.0, 1e-12);
        EXPECT_NEAR(linf.support(u), u.lpNorm<1>(), 1e-12);
        EXPECT_NEAR(l1.support(u), u.lpNorm<Eigen::Infinity>(), 1e-12);
        double q = 1.5, s = 0;
        for (int j = 0; j < 4; ++j) s += std::pow(std::abs(u[j]), q);
        EXPECT_NEAR(l3.support(u), std::pow(s, 1 / q), 1e-9);
    }
}

TEST(Support, DominatesEveryInteriorPoint) {
    Rng rng(2);
    for (const auto& body : sample_bodies()) {
        Vec lo = body.lower(), hi = body.upper();
        for (int i = 0; i < 200; ++i) {
            Vec x(body.dim());
            for (int j = 0; j < body.dim(); ++j) x[j] = rng.uniform(lo[j], hi[j]);
            if (!body.contains(x)) continue;
            Vec u = random_unit(body.dim(), rng);
            EXPECT_LE(x.dot(u), body.support(u) + 1e-12) << body.name();
        }
    }
}

TEST(Radial, BoundaryPointsAreOnTheBoundary) {
    Rng rng(3);
    for (const auto& body : sample_bodies())
        for (int i = 0; i < 50; ++i) {
            Vec u = random_unit(body.dim(), rng);
            double r = body.radial(u);
            EXPECT_TRUE(body.contains((1 - 1e-6) * r * u)) << body.name();
            EXPECT_FALSE(body.contains((1 + 1e-6) * r * u)) << body.name();
            // The boundary point lies in the supporting half-space of every direction.
            Vec v = random_unit(body.dim(), rng);
            EXPECT_LE(r * u.dot(v), body.support(v) + 1e-9);
        }
}

TEST(Polytope, SquareHullMatchesTheCube) {
    std::vector<Vec> verts;
    for (int s : {-1, 1})
        for (int t : {-1, 1}) {
            Vec v(2);
            v << 0.5 * s, 0.5 * t;
            verts.push_back(v);
        }
    Vec mid(2);
    mid << 0.1, 0.2;
    verts.push_back(mid);  // interior point is discarded
    auto poly = ConvexBody::polytope(verts);
    auto cube = ConvexBody::cube(2);
    EXPECT_EQ(poly.facet_normals().size(), 4u);
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
        Vec u = random_unit(2, rng);
        EXPECT_NEAR(poly.support(u), cube.support(u), 1e-12);
        EXPECT_NEAR(poly.radial(u), cube.radial(u), 1e-12);
    }
    EXPECT_TRUE(poly.symmetric());
}

TEST(Volume, ClosedForms) {
    EXPECT_NEAR(ConvexBody::cube(3, 2.0).exact_volume(), 8.0, 1e-12);
    EXPECT_NEAR(ConvexBody::cross_polytope(4).exact_volume(), 16.0 / 24.0, 1e-12);
    EXPECT_NEAR(ConvexBody::p_ball(3, 2.0).exact_volume(), 4 * kPi / 3, 1e-12);
    EXPECT_NEAR(ConvexBody::p_ball(3, 3.0).exact_volume(), p_ball_volume(3, 3.0), 1e-10);
    EXPECT_NEAR(ConvexBody::product_of_balls({2, 3}).exact_volume(), 1.0, 1e-12);
    EXPECT_NEAR(ConvexBody::cube(3).scaled(2.0).exact_volume(), 8.0, 1e-12);
}

TEST(Volume, MonteCarloAgreesWithClosedForms) {
    for (const auto& body : sample_bodies()) {
        auto est = body_volume(body, 1 << 15, 5);
        double exact = body.exact_volume();
        ASSERT_GT(exact, 0.0) << body.name();
        EXPECT_NEAR(est.value, exact, 4 * est.std_error + 1e-12) << body.name();
    }
}

TEST(Width, KnownBodies) {
    EXPECT_NEAR(width(ConvexBody::cube(3)).value, 1.0, 1e-9);
    EXPECT_NEAR(width(ConvexBody::cross_polytope(3)).value, 2 / std::sqrt(3.0), 1e-9);
    Vec half(3);
    half << 0.5, 1.0, 1.5;
    EXPECT_NEAR(width(ConvexBody::box(half)).value, 1.0, 1e-9);
    EXPECT_NEAR(width(ConvexBody::p_ball(3, 2.0)).value, 2.0, 1e-9);
}

TEST(Width, IsTwiceTheInscribedRadiusForSymmetricBodies) {
    Rng rng(6);
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<Vec> verts;
        for (int i = 0; i < 5; ++i) {
            Vec v = rng.normal_vector(3);
            verts.push_back(v);
            verts.push_back(-v);
        }
        auto body = ConvexBody::polytope(verts);
        auto w = width(body);
        auto r = inscribed_touching_pair(body);
        EXPECT_NEAR(w.value, 2 * r.value, 1e-6);
        // Width is a minimum, so no random direction beats it.
        for (int i = 0; i < 50; ++i) {
            Vec u = random_unit(3, rng);
            EXPECT_GE(body.support(u) + body.support(-u), w.value - 1e-12);
        }
    }
}

TEST(Sections, CoordinateAndDiagonalSections) {
    Mat e1 = Mat::Zero(2, 1);
    e1(0, 0) = 1;
    auto cube = ConvexBody::cube(2);
    auto a = central_section_volume(cube, e1, 4096, 1);
    EXPECT_NEAR(a.value, 1.0, 1e-9);
    Mat diag(2, 1);
    diag << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    EXPECT_NEAR(central_section_volume(cube, diag, 4096, 1).value, std::sqrt(2.0), 1e-9);
    Mat plane = Mat::Zero(3, 2);
    plane(0, 0) = 1;
    plane(1, 1) = 1;
    auto ball = central_section_volume(ConvexBody::p_ball(3, 2.0), plane, 1 << 15, 2);
    EXPECT_NEAR(ball.value, kPi, 4 * ball.std_error + 1e-9);
}

TEST(Sections, CentralCubeSectionsAreAtLeastOne) {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 3 + static_cast<int>(rng.below(3));
        int m = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(n - 1)));
        Mat frame = random_frame(n, m, rng);
        auto est = central_section_volume(ConvexBody::cube(n), frame, 1 << 14, 10 + trial);
        EXPECT_GE(est.value, 1.0 - 4 * est.std_error);
    }
}

TEST(Sections, BallProfileIsLogConcave) {
    Mat plane = Mat::Zero(3, 2);
    plane(0, 0) = 1;
    plane(1, 1) = 1;
    Vec dir = Vec::Unit(3, 2);
    auto check = section_profile_logconcavity_check(ConvexBody::p_ball(3, 2.0), plane, dir,
                                                    {-0.6, -0.3, 0.0, 0.3, 0.6}, 1 << 14, 3);
    EXPECT_TRUE(check.pass) << check.failure;
    ASSERT_EQ(check.values.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) {
        double s = check.offsets[i];
        EXPECT_NEAR(check.values[i].value, kPi * (1 - s * s), 4 * check.values[i].std_error + 1e-9);
    }
}

TEST(Sections, MinimalSectionOfNormalizedCube) {
    auto s = min_section_search(ConvexBody::cube(3), 1, 2, 1 << 14, 4);
    EXPECT_TRUE(s.pass);
    EXPECT_NEAR(s.bound, kPi, 1e-12);
    EXPECT_NEAR(std::pow(s.scale, 3), 4 * kPi / 3, 1e-9);
    EXPECT_LE(s.best.value, s.bound);
    EXPECT_TRUE(is_orthonormal(s.frame));
}

TEST(Bodies, RejectBadParameters) {
    EXPECT_THROW(ConvexBody::p_ball(3, 0.5), DomainError);
    EXPECT_THROW(ConvexBody::cube(0), DomainError);
}
