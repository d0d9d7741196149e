#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "waistlab/errors.hpp"
#include "waistlab/fibrations.hpp"
#include "waistlab/rng.hpp"
#include "waistlab/spaces.hpp"

using namespace waistlab;

namespace {

constexpr double kPi = std::numbers::pi;

Vec random_unit(int n, Rng& rng) {
    Vec v = rng.normal_vector(n);
    return v / v.norm();
}

}  // namespace

TEST(CayleyDickson, NormIsMultiplicative) {
    Rng rng(1);
    for (int m : {1, 2, 4, 8})
        for (int trial = 0; trial < 50; ++trial) {
            Vec x = rng.normal_vector(m), y = rng.normal_vector(m);
            EXPECT_NEAR(cd_multiply(x, y).norm(), x.norm() * y.norm(), 1e-12 * (1 + x.norm() * y.norm()));
        }
}

TEST(CayleyDickson, ConjugateGivesSquaredNorm) {
    Rng rng(2);
    for (int m : {1, 2, 4, 8}) {
        Vec x = rng.normal_vector(m);
        Vec p = cd_multiply(x, cd_conjugate(x));
        EXPECT_NEAR(p[0], x.squaredNorm(), 1e-12);
        EXPECT_NEAR(p.tail(m - 1).norm(), 0.0, 1e-12);
    }
}

TEST(CayleyDickson, ComplexAndQuaternionProducts) {
    Vec i(2), r(2);
    i << 0, 1;
    r = cd_multiply(i, i);
    EXPECT_NEAR(r[0], -1, 1e-15);
    EXPECT_NEAR(r[1], 0, 1e-15);
    // Quaternions are not commutative: ij = -ji.
    Vec qi = Vec::Unit(4, 1), qj = Vec::Unit(4, 2);
    EXPECT_NEAR((cd_multiply(qi, qj) + cd_multiply(qj, qi)).norm(), 0.0, 1e-15);
    EXPECT_NEAR(cd_multiply(qi, qj).norm(), 1.0, 1e-15);
}

TEST(Hopf, MapsSpheresToSpheresAndIsConstantOnFibres) {
    Rng rng(3);
    for (auto map : {FiberMap::hopf_3_2(), FiberMap::hopf_7_4()}) {
        const int n = map.source().ambient_dim;
        for (int trial = 0; trial < 20; ++trial) {
            Vec p = random_unit(n, rng);
            Vec y = map.evaluate(p);
            EXPECT_NEAR(y.norm(), 1.0, 1e-12);
            auto mesh = map.fiber_mesh(y, 2);
            for (const auto& v : mesh.vertices) EXPECT_NEAR((map.evaluate(v) - y).norm(), 0.0, 1e-9);
        }
    }
}

TEST(Hopf, FibreVolumesAreGreatSpheres) {
    Vec y3 = Vec::Unit(3, 2), y5 = Vec::Unit(5, 0), y9 = Vec::Unit(9, 4);
    EXPECT_NEAR(FiberMap::hopf_3_2().fiber_volume(y3), 2 * kPi, 1e-12);
    EXPECT_NEAR(FiberMap::hopf_7_4().fiber_volume(y5), 2 * kPi * kPi, 1e-12);
    EXPECT_NEAR(FiberMap::hopf_15_8().fiber_volume(y9), std::pow(kPi, 4) / 3, 1e-10);
    EXPECT_NEAR(FiberMap::rp_quotient(FiberMap::hopf_3_2()).fiber_volume(y3), kPi, 1e-12);
    EXPECT_NEAR(FiberMap::cp_quotient(FiberMap::hopf_7_4()).fiber_volume(y5), kPi, 1e-12);
}

TEST(Hopf, MeshVolumeConvergesToFibreVolume) {
    Rng rng(4);
    auto map = FiberMap::hopf_3_2();
    Vec y = random_unit(3, rng);
    double prev = 1e300;
    for (int res : {8, 32, 128}) {
        double err = std::abs(map.fiber_mesh(y, res).volume() - 2 * kPi);
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 1e-3);
}

TEST(Linear, FibreIsASmallSphere) {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 2 + static_cast<int>(rng.below(4));
        int k = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(n)));
        Mat rows = random_frame(n + 1, k, rng).transpose();
        auto map = FiberMap::linear_projection(n, rows);
        Vec y = 0.7 * random_unit(k, rng) * rng.uniform();
        int d = n - k;
        double exact = sphere_volume(d) * std::pow(1 - y.squaredNorm(), 0.5 * d);
        EXPECT_NEAR(map.fiber_volume(y), exact, 1e-12);
        EXPECT_EQ(map.codim(), k);
        auto mesh = map.fiber_mesh(y, 4);
        for (const auto& v : mesh.vertices) {
            EXPECT_NEAR(v.norm(), 1.0, 1e-12);
            EXPECT_NEAR((map.evaluate(v) - y).norm(), 0.0, 1e-12);
        }
    }
}

TEST(Linear, EquatorIsTheLargestFibre) {
    Mat rows = Mat::Zero(1, 4);
    rows(0, 3) = 1;
    auto map = FiberMap::linear_projection(3, rows);
    auto sup = measured_sup(map);
    EXPECT_NEAR(sup.volume, 4 * kPi, 1e-12);
    EXPECT_NEAR(sup.y.norm(), 0.0, 1e-12);
}

TEST(TorusFibres, AreTheLeadingFactors) {
    auto map = FiberMap::torus_projection({1.0, 2.0, 3.0}, 1);
    EXPECT_NEAR(map.fiber_volume(Vec::Constant(1, 1.5)), 2.0, 1e-15);
    EXPECT_NEAR(map.fiber_mesh(Vec::Constant(1, 1.5), 4).volume(), 2.0, 1e-12);
}

TEST(ScalarMaps, AbsZ1TorusArea) {
    auto s3 = FiberMap::abs_z1_on_s3();
    auto rp3 = FiberMap::abs_z1_on_rp3();
    for (double r : {0.2, 0.5, 0.9}) {
        double area = 4 * kPi * kPi * r * std::sqrt(1 - r * r);
        EXPECT_NEAR(s3.fiber_volume(Vec::Constant(1, r)), area, 1e-12);
        EXPECT_NEAR(rp3.fiber_volume(Vec::Constant(1, r)), 0.5 * area, 1e-12);
        EXPECT_NEAR(s3.fiber_mesh(Vec::Constant(1, r), 64).volume(), area, 2e-3 * area);
    }
    auto sup = measured_sup(rp3);
    EXPECT_NEAR(sup.volume, kPi * kPi, 1e-9);
    EXPECT_NEAR(sup.y[0], 1 / std::sqrt(2.0), 1e-4);
}

TEST(ScalarMaps, X1SquaredFibresApproachTwoPi) {
    auto map = FiberMap::x1_squared_on_rp2();
    EXPECT_NEAR(map.fiber_volume(Vec::Constant(1, 0.0)), kPi, 1e-15);
    EXPECT_NEAR(map.fiber_volume(Vec::Constant(1, 0.75)), kPi, 1e-12);
    EXPECT_NEAR(map.fiber_volume(Vec::Constant(1, 1e-8)), 2 * kPi, 1e-7);
    EXPECT_NEAR(map.fiber_mesh(Vec::Constant(1, 0.36), 256).volume(), 2 * kPi * 0.8 * 2, 1e-3);
}

TEST(TubeVolumes, ClosedForms) {
    for (double t : {0.05, 0.3, 1.0}) {
        EXPECT_NEAR(great_sphere_tube_volume(2, 1, t), 4 * kPi * std::sin(t), 1e-10);
        EXPECT_NEAR(great_sphere_tube_volume(2, 0, t), 4 * kPi * (1 - std::cos(t)), 1e-10);
        EXPECT_NEAR(great_sphere_tube_volume(3, 1, t), 2 * kPi * kPi * std::sin(t) * std::sin(t), 1e-10);
        EXPECT_NEAR(rp_tube_volume(2, 1, t), 2 * kPi * std::sin(t), 1e-10);
        for (int n = 1; n <= 3; ++n) {
            double f = std::tgamma(n + 1.0);
            EXPECT_NEAR(cp_tube_volume(n, 0, t), std::pow(kPi, n) / f * std::pow(std::sin(t), 2 * n), 1e-10);
        }
    }
    EXPECT_NEAR(great_sphere_tube_volume(3, 1, kPi / 2), sphere_volume(3), 1e-10);
    EXPECT_THROW(great_sphere_tube_volume(2, 3, 0.1), DomainError);
}

TEST(Verify, SphereAndProjectiveBounds) {
    auto hopf = FiberMap::hopf_3_2();
    auto c = verify_waist_bound(hopf, "sphere-equator");
    EXPECT_TRUE(c.pass);
    EXPECT_NEAR(c.bound, 2 * kPi, 1e-12);
    auto rp = FiberMap::rp_quotient(hopf);
    auto e = verify_waist_bound(rp, "even-map-pi");
    EXPECT_TRUE(e.pass);
    EXPECT_NEAR(e.measured_sup, kPi, 1e-12);
    EXPECT_TRUE(verify_waist_bound(rp, "rpn-volume").pass);
    EXPECT_TRUE(verify_waist_bound(FiberMap::abs_z1_on_rp3(), "rp3-pi2").pass);
    EXPECT_TRUE(verify_waist_bound(FiberMap::x1_squared_on_rp2(), "x1sq-2pi").pass);
    EXPECT_TRUE(verify_waist_bound(FiberMap::torus_projection({1, 2, 3}, 1), "torus-product").pass);
}

TEST(Verify, HopfFibresAreEqual) {
    auto c = verify_waist_bound(FiberMap::hopf_7_4(), "hopf-constant");
    EXPECT_TRUE(c.pass);
    EXPECT_NEAR(c.bound, 2 * kPi * kPi, 1e-12);
}

TEST(Verify, ProjectiveTubeBound) {
    VerifyOptions opt;
    opt.samples = 20000;
    opt.resolution = 32;
    opt.t_schedule = {0.05, 0.1};
    auto c = verify_waist_bound(FiberMap::rp_quotient(FiberMap::hopf_3_2()), "rpn-nu-t", opt);
    EXPECT_TRUE(c.pass);
}

TEST(Verify, InapplicableBoundIsAUsageError) {
    EXPECT_THROW(verify_waist_bound(FiberMap::hopf_3_2(), "even-map-pi"), UsageError);
    EXPECT_THROW(verify_waist_bound(FiberMap::hopf_3_2(), "no-such-bound"), UsageError);
    EXPECT_THROW(FiberMap::hopf_3_2().fiber_volume(Vec::Zero(3)), DomainError);
}
