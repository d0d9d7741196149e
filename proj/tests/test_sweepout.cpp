#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "waistlab/errors.hpp"
#include "waistlab/rng.hpp"
#include "waistlab/sweepout.hpp"

using namespace waistlab;

namespace {

bool on_grid(double v, const Grid& g) {
    double s = v * g.cells;
    return std::abs(s - std::round(s)) < 1e-9;
}

bool at_centre(double v, const Grid& g) {
    double s = v * g.cells - 0.5;
    return std::abs(s - std::round(s)) < 1e-9;
}

}  // namespace

TEST(Grid, FaceCountsHaveEulerCharacteristicOne) {
    for (int n = 1; n <= 4; ++n)
        for (int c = 1; c <= 5; ++c) {
            Grid g{n, c};
            EXPECT_EQ(g.p(), static_cast<std::int64_t>(std::llround(std::pow(c, n))));
            std::int64_t chi = 0;
            for (int d = 0; d <= n; ++d) chi += (d % 2 ? -1 : 1) * g.face_count(d);
            EXPECT_EQ(chi, 1);
        }
    Grid sq{2, 3};
    EXPECT_EQ(sq.face_count(0), 16);
    EXPECT_EQ(sq.face_count(1), 24);
    EXPECT_EQ(sq.face_count(2), 9);
}

TEST(Tiles, DecompositionReconstructsThePoint) {
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + static_cast<int>(rng.below(2));
        int k = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(n - 1)));
        Grid g{n, 1 + static_cast<int>(rng.below(5))};
        Vec q(n);
        for (int i = 0; i < n; ++i) q[i] = rng.uniform();
        auto tc = tile_decompose(g, k, q);
        ASSERT_GE(tc.t, -1e-12);
        ASSERT_LE(tc.t, 1 + 1e-12);
        EXPECT_NEAR(((1 - tc.t) * tc.x + tc.t * tc.y - q).norm(), 0.0, 1e-9);
        ASSERT_EQ(static_cast<int>(tc.fixed.size()), k);
        // x lies on a primal (n-k)-face, y on a dual (k-1)-face.
        for (int i : tc.fixed) EXPECT_TRUE(on_grid(tc.x[i], g));
        int centred = 0;
        for (int i = 0; i < n; ++i) centred += at_centre(tc.y[i], g);
        EXPECT_GE(centred, n - k + 1);
        for (int i = 0; i < n; ++i) {
            double lo = tc.cell[i] * g.side() - 1e-12, hi = (tc.cell[i] + 1) * g.side() + 1e-12;
            EXPECT_TRUE(tc.x[i] >= lo && tc.x[i] <= hi);
            EXPECT_TRUE(tc.y[i] >= lo && tc.y[i] <= hi);
        }
    }
}

TEST(Tiles, RejectsBadInput) {
    Grid g{2, 2};
    EXPECT_THROW(tile_decompose(g, 2, Vec::Zero(2)), DomainError);
    EXPECT_THROW(tile_decompose(g, 1, Vec::Constant(2, 1.5)), DomainError);
    EXPECT_THROW(tile_decompose(g, 1, Vec::Zero(3)), UsageError);
    EXPECT_THROW(psi_epsilon(g, 1, 1.0, Vec::Zero(2)), DomainError);
}

TEST(Psi, CollapsesOutsideTheCollarAndFixesTheSkeleton) {
    Rng rng(2);
    Grid g{2, 4};
    const double eps = 0.25;
    for (int trial = 0; trial < 200; ++trial) {
        Vec q(2);
        q << rng.uniform(), rng.uniform();
        auto tc = tile_decompose(g, 1, q);
        Vec image = psi_epsilon(g, 1, eps, q);
        if (tc.t <= 1 - eps) EXPECT_TRUE(on_grid(image[0], g) || on_grid(image[1], g));
        // Points of the primal 1-skeleton stay put.
        Vec edge(2);
        edge << std::round(q[0] * 4) / 4, q[1];
        EXPECT_NEAR((psi_epsilon(g, 1, eps, edge) - edge).norm(), 0.0, 1e-9);
    }
    Vec centre = Vec::Constant(2, 0.125);
    EXPECT_NEAR((psi_epsilon(g, 1, eps, centre) - centre).norm(), 0.0, 1e-12);
}

TEST(Psi, IsContinuous) {
    Rng rng(3);
    Grid g{3, 2};
    for (int k : {1, 2})
        for (int trial = 0; trial < 200; ++trial) {
            Vec q(3);
            for (int i = 0; i < 3; ++i) q[i] = 0.01 + 0.98 * rng.uniform();
            Vec dq = 1e-7 * rng.normal_vector(3);
            double jump = (psi_epsilon(g, k, 0.25, q + dq) - psi_epsilon(g, k, 0.25, q)).norm();
            EXPECT_LT(jump, 1e-4);
        }
}

TEST(FlatSection, KnownChords) {
    Vec lo = Vec::Zero(2), hi = Vec::Ones(2);
    Mat d(2, 1);
    d << 1, 0;
    Vec p(2);
    p << 0.3, 0.4;
    EXPECT_NEAR(flat_box_section(p, d, lo, hi), 1.0, 1e-12);
    d << 1, 1;
    p << 0.5, 0.5;
    EXPECT_NEAR(flat_box_section(p, d.normalized(), lo, hi), std::sqrt(2.0), 1e-12);
    p << 0.5, 1.5;
    EXPECT_NEAR(flat_box_section(p, d.normalized(), lo, hi), 0.0, 1e-12);
    Mat plane = Mat::Zero(3, 2);
    plane(0, 0) = 1;
    plane(1, 1) = 1;
    EXPECT_NEAR(flat_box_section(Vec::Constant(3, 0.5), plane, Vec::Zero(3), Vec::Ones(3)), 1.0, 1e-12);
    Mat diag(3, 2);
    diag << 1, 0, 0, 1, 1, 0;
    diag.col(0).normalize();
    EXPECT_NEAR(flat_box_section(Vec::Constant(3, 0.5), diag, Vec::Zero(3), Vec::Ones(3)), std::sqrt(2.0), 1e-12);
}

TEST(FlatSection, RandomLinesMatchSampling) {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        Vec p(2);
        p << rng.uniform(), rng.uniform();
        Mat d(2, 1);
        d.col(0) = rng.normal_vector(2).normalized();
        const int m = 200000;
        int inside = 0;
        for (int i = 0; i < m; ++i) {
            Vec x = p + (-2.0 + 4.0 * (i + 0.5) / m) * d.col(0);
            inside += x.minCoeff() >= 0 && x.maxCoeff() <= 1;
        }
        EXPECT_NEAR(flat_box_section(p, d, Vec::Zero(2), Vec::Ones(2)), 4.0 * inside / m, 1e-4);
    }
}

TEST(Bending, TotalStaysWithinTheBound) {
    Rng rng(5);
    for (int cells : {2, 4, 8}) {
        Grid g{2, cells};
        const double sp = std::sqrt(static_cast<double>(g.p()));
        for (int trial = 0; trial < 3; ++trial) {
            Vec u = rng.normal_vector(2).normalized();
            Mat U = u;
            FlatFamily fam{U, {}};
            for (int i = 0; i < 9; ++i) fam.offsets.push_back(Vec::Constant(1, 0.5 * u.sum() + 0.3 * (rng.uniform() - 0.5)));
            double eps = choose_epsilon(g, 1, U);
            ASSERT_GT(eps, 0.0);
            auto r = deform_family(fam, g, eps, 16);
            EXPECT_LE(r.total, 4 * sp + 2 + 1e-9);
            EXPECT_LE(r.z1, 2 * sp + 2 + 1e-9);
            EXPECT_LE(r.z2, 2 * sp + 1e-9);
            EXPECT_NEAR(r.total, r.z1 + r.z2, 1e-9);
        }
    }
}

TEST(Bending, CupReportPassesAndWritesCsv) {
    auto rep = cup_bound_check(2, 1, 4, 3, 7);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.p, 16);
    EXPECT_NEAR(rep.lower_reference, 4.0, 1e-12);
    EXPECT_NEAR(rep.upper_bound, 8 * 2 * 4.0, 1e-12);
    EXPECT_EQ(rep.rows.size(), 3u);
    std::stringstream ss;
    write_trial_csv(ss, rep);
    std::string header;
    std::getline(ss, header);
    EXPECT_EQ(header, "n,k,cells,p,trial,direction,eps,z1,z2,total");
    int lines = 0;
    for (std::string line; std::getline(ss, line);) ++lines;
    EXPECT_EQ(lines, 3);
}

TEST(Polynomials, InterpolantVanishesAtThePoints) {
    Rng rng(6);
    for (int count : {2, 5, 9, 14}) {
        std::vector<Vec> pts;
        for (int i = 0; i < count; ++i) {
            Vec v(2);
            v << rng.uniform(), rng.uniform();
            pts.push_back(v);
        }
        auto poly = interpolating_polynomial(pts, rng);
        EXPECT_EQ((poly.degree + 1) * (poly.degree + 2) / 2 > count, true);
        EXPECT_EQ(poly.degree * (poly.degree + 1) / 2 <= count, true);
        for (const auto& p : pts) EXPECT_NEAR(poly(p[0], p[1]), 0.0, 1e-9);
    }
}

TEST(Polynomials, LineRootsAndLength) {
    Polynomial2 vertical{1, {0.0, 1.0, 0.0}};  // X = 0, the line x = 1/2
    Vec o(2), d(2);
    o << 0.0, 0.3;
    d << 1.0, 0.0;
    EXPECT_EQ(count_line_roots(vertical, o, d), 1);
    o << 0.0, 0.3;
    d << 0.0, 1.0;
    EXPECT_EQ(count_line_roots(vertical, o, d), 0);
    auto len = algebraic_family_volume(vertical, 20000, 1);
    EXPECT_NEAR(len.value, 1.0, 4 * len.std_error);
    // X^2 + Y^2 = 1/4 is the circle of radius 1/4 about the centre.
    Polynomial2 circle{2, {-0.25, 0, 0, 1, 0, 1}};
    auto c = algebraic_family_volume(circle, 40000, 2);
    EXPECT_NEAR(c.value, 2 * std::numbers::pi * 0.25, 4 * c.std_error);
}
