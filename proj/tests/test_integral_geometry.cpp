#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "waistlab/errors.hpp"
#include "waistlab/integral_geometry.hpp"
#include "waistlab/mesh.hpp"
#include "waistlab/rng.hpp"

using namespace waistlab;

namespace {

constexpr double kPi = std::numbers::pi;

Mat axes(int ambient, std::initializer_list<int> cols) {
    Mat f = Mat::Zero(ambient, static_cast<int>(cols.size()));
    int j = 0;
    for (int c : cols) f(c, j++) = 1.0;
    return f;
}

SubmanifoldMesh circle(const Vec& centre, double radius, int segments) {
    std::vector<Vec> pts;
    for (int i = 0; i < segments; ++i) {
        double a = 2 * kPi * i / segments;
        Vec p = centre;
        p[0] += radius * std::cos(a);
        p[1] += radius * std::sin(a);
        pts.push_back(p);
    }
    return polyline_mesh(pts, true, false);
}

// Latitude circle z = sin(phi) on S^2, geodesic segments.
SubmanifoldMesh latitude(double phi, int segments) {
    std::vector<Vec> pts;
    for (int i = 0; i < segments; ++i) {
        double a = 2 * kPi * i / segments;
        Vec p(3);
        p << std::cos(phi) * std::cos(a), std::cos(phi) * std::sin(a), std::sin(phi);
        pts.push_back(p);
    }
    return polyline_mesh(pts, true, true);
}

}  // namespace

TEST(Crofton, GreatCircleMeetsEveryEquatorTwice) {
    SubmanifoldMesh m = great_sphere_mesh(axes(3, {0, 1}), 16);
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        auto c = count_intersections(m, sample_equator(2, 1, rng));
        EXPECT_EQ(c.count, 2);
    }
    auto est = crofton_volume(m, 1, 4096, 3);
    EXPECT_NEAR(est.value, 2 * kPi, 1e-12);
}

TEST(Crofton, EquatorialCircleInS3) {
    SubmanifoldMesh m = great_sphere_mesh(axes(4, {0, 1}), 16);
    auto est = crofton_volume(m, 2, 10000, 1);
    EXPECT_NEAR(est.value, 2 * kPi, 0.02 * 2 * kPi);
}

TEST(Crofton, GreatTwoSphereInS3) {
    SubmanifoldMesh m = great_sphere_mesh(axes(4, {0, 1, 2}), 6);
    auto est = crofton_volume(m, 1, 2000, 2);
    EXPECT_NEAR(est.value, 4 * kPi, 1e-9);
}

TEST(Crofton, LatitudeCircle) {
    // Spherical Crofton counts geodesic arcs; a fine polyline tracks the small circle.
    for (double phi : {0.3, 0.9}) {
        SubmanifoldMesh m = latitude(phi, 400);
        auto est = crofton_volume(m, 1, 20000, 4);
        double exact = 2 * kPi * std::cos(phi);
        EXPECT_NEAR(est.value, exact, std::max(4 * est.std_error, 1e-3 * exact)) << phi;
    }
}

TEST(Crofton, SameSeedSameEstimate) {
    SubmanifoldMesh m = latitude(0.5, 64);
    auto a = crofton_volume(m, 1, 5000, 9, 1);
    auto b = crofton_volume(m, 1, 5000, 9, 3);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Crofton, DimensionChecks) {
    SubmanifoldMesh m = great_sphere_mesh(axes(3, {0, 1}), 4);
    Rng rng(1);
    EXPECT_THROW(count_intersections(m, sample_equator(2, 0, rng)), UsageError);
    EXPECT_THROW(sample_equator(2, 2, rng), DomainError);
}

TEST(CauchyCrofton, UnitSegmentAndCircle) {
    Vec lo = Vec::Zero(2), hi = Vec::Ones(2);
    std::vector<Vec> seg{(Vec(2) << 0.1, 0.2).finished(), (Vec(2) << 0.9, 0.8).finished()};
    auto est = cauchy_crofton_euclidean(polyline_mesh(seg, false, false), 1, lo, hi, 40000, 1);
    EXPECT_NEAR(est.value, 1.0, 4 * est.std_error);

    SubmanifoldMesh c = circle((Vec(2) << 0.5, 0.5).finished(), 0.3, 256);
    auto ec = cauchy_crofton_euclidean(c, 1, lo, hi, 40000, 2);
    EXPECT_NEAR(ec.value, c.volume(), 4 * ec.std_error);
    EXPECT_NEAR(c.volume(), 2 * kPi * 0.3, 1e-3);
}

TEST(CauchyCrofton, SurfaceAreaInR3) {
    auto param = [](double u, double v) {
        Vec p(3);
        p << 0.5 + 0.3 * std::cos(u) * std::sin(v), 0.5 + 0.3 * std::sin(u) * std::sin(v), 0.5 + 0.3 * std::cos(v);
        return p;
    };
    SubmanifoldMesh s = surface_mesh([&](double a, double b) { return param(2 * kPi * a, 1e-3 + (kPi - 2e-3) * b); },
                                     24, 12, true, false, false);
    auto est = cauchy_crofton_euclidean(s, 1, Vec::Zero(3), Vec::Ones(3), 4000, 3);
    EXPECT_NEAR(est.value, s.volume(), 4 * est.std_error + 1e-3);
}

TEST(CauchyCrofton, CurveLengthInR3) {
    std::vector<Vec> seg{Vec::Constant(3, 0.1), Vec::Constant(3, 0.9)};
    auto est = cauchy_crofton_euclidean(polyline_mesh(seg, false, false), 2, Vec::Zero(3), Vec::Ones(3), 40000, 4);
    EXPECT_NEAR(est.value, 0.8 * std::sqrt(3.0), 4 * est.std_error);
}

TEST(CauchyCrofton, DegreeTwoCurveBound) {
    // Each line meets a circle at most twice, so the estimate is at most
    // (d/2) times the boundary length of the square.
    Rng rng(5);
    for (int i = 0; i < 5; ++i) {
        double r = rng.uniform(0.1, 0.45);
        SubmanifoldMesh c = circle((Vec(2) << 0.5, 0.5).finished(), r, 128);
        auto est = cauchy_crofton_euclidean(c, 1, Vec::Zero(2), Vec::Ones(2), 5000, 10 + i);
        EXPECT_LE(est.value, 4.0 + 3 * est.std_error);
    }
}

TEST(CauchyCrofton, FlatMeetsSimplex) {
    Mat tri(2, 2);
    tri << 0, 1, 0, 1;  // segment from (0,0) to (1,1)
    Mat dir(2, 1);
    dir << 1, 0;
    EXPECT_TRUE(flat_meets_simplex((Vec(2) << 0.0, 0.5).finished(), dir, tri));
    EXPECT_FALSE(flat_meets_simplex((Vec(2) << 0.0, 1.5).finished(), dir, tri));
}

TEST(CauchyCrofton, CalibrationIsPositive) {
    for (auto [n, k] : {std::pair{2, 1}, std::pair{3, 1}, std::pair{3, 2}}) EXPECT_GT(euclidean_crofton_calibration(n, k), 0.0);
}
