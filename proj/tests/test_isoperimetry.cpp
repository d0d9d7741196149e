#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "waistlab/errors.hpp"
#include "waistlab/isoperimetry.hpp"
#include "waistlab/rng.hpp"

using namespace waistlab;

namespace {

// Brute-force squared distance between cell centres, with periodic wrap.
std::vector<double> brute_distance(const BinaryField& f, const std::vector<std::uint8_t>& target) {
    std::vector<double> d(f.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto a = f.cell(i);
        for (std::size_t j = 0; j < f.size(); ++j) {
            if (!target[j]) continue;
            auto b = f.cell(j);
            double s = 0;
            for (int k = 0; k < f.dims(); ++k) {
                double diff = std::abs(a[k] - b[k]);
                if (f.periodic) diff = std::min(diff, f.resolution[k] - diff);
                s += std::pow(diff * f.spacing(k), 2);
            }
            d[i] = std::min(d[i], s);
        }
    }
    return d;
}

}  // namespace

TEST(Field, IndexRoundTrip) {
    auto f = empty_field({1.0, 2.0, 3.0}, {3, 4, 5}, true);
    EXPECT_EQ(f.size(), 60u);
    EXPECT_EQ(f.index({1, 0, 0}), 1u);
    EXPECT_EQ(f.index({0, 1, 0}), 3u);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(f.index(f.cell(i)), i);
    EXPECT_NEAR(f.cell_volume(), 6.0 / 60.0, 1e-15);
}

TEST(Field, HalfSlabAndRandomFieldsHaveHalfVolume) {
    auto s = half_slab({1.0, 2.0}, {16, 8}, true, 1);
    EXPECT_NEAR(s.occupancy(), 0.5, 1e-15);
    EXPECT_EQ(s.cells[s.index({3, 2})], 1);
    EXPECT_EQ(s.cells[s.index({3, 5})], 0);
    Rng rng(1);
    for (int trial = 0; trial < 5; ++trial) {
        auto r = random_half_volume({1.0, 1.5}, {32, 48}, trial % 2 == 0, rng);
        EXPECT_NEAR(r.occupancy(), 0.5, 1e-15);
    }
}

TEST(Field, TextRoundTrip) {
    Rng rng(2);
    auto f = random_half_volume({1.0, 2.0}, {8, 6}, false, rng);
    std::stringstream ss;
    write_field(ss, f);
    auto g = read_field(ss);
    EXPECT_EQ(g.resolution, f.resolution);
    EXPECT_EQ(g.lengths, f.lengths);
    EXPECT_EQ(g.periodic, f.periodic);
    EXPECT_EQ(g.cells, f.cells);
}

TEST(Field, MalformedInputIsAUsageError) {
    std::stringstream bad("grid\n");
    EXPECT_THROW(read_field(bad), UsageError);
    auto f = empty_field({1.0}, {4}, true);
    std::stringstream ss;
    write_field(ss, f);
    std::string text = ss.str();
    std::stringstream truncated(text.substr(0, text.size() - 2));
    EXPECT_THROW(read_field(truncated), UsageError);
    EXPECT_THROW(empty_field({1.0, 2.0}, {4}, true), UsageError);
}

TEST(GaussianProfile, IsAnErf) {
    for (double t : {0.0, 0.1, 0.5, 1.0, 3.0})
        EXPECT_NEAR(gaussian_profile(t), std::erf(std::sqrt(std::numbers::pi) * t), 1e-12);
    EXPECT_THROW(gaussian_profile(-1.0), DomainError);
}

TEST(DistanceTransform, MatchesBruteForce) {
    Rng rng(3);
    for (bool periodic : {true, false}) {
        auto f = empty_field({1.0, 2.0}, {10, 10}, periodic);
        std::vector<std::uint8_t> target(f.size(), 0);
        for (int i = 0; i < 6; ++i) target[rng.below(f.size())] = 1;
        auto fast = squared_distance_transform(f, target);
        auto slow = brute_distance(f, target);
        for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(fast[i], slow[i], 1e-12);
    }
}

TEST(Halving, BoxesTileAndHalveM) {
    Rng rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        auto f = random_half_volume({1.0, 2.0, 1.0}, {16, 16, 8}, true, rng);
        auto boxes = torus_halving_translations(f);
        EXPECT_EQ(boxes.size(), 8u);
        EXPECT_TRUE(boxes_tile(f, boxes));
        for (const auto& b : boxes) EXPECT_NEAR(b.occupancy, 0.5, 0.1);
    }
}

TEST(Halving, RejectsNonHalfSets) {
    auto f = empty_field({1.0, 1.0}, {8, 8}, true);
    EXPECT_THROW(torus_halving_translations(f), UsageError);
    auto odd = half_slab({1.0, 1.0}, {8, 7}, true, 0);
    EXPECT_THROW(torus_halving_translations(odd), UsageError);
}

TEST(BoundaryContent, HalfSlabs) {
    // A periodic half-slab has two walls of area a_2 a_3; in a box it has one.
    auto torus = half_slab({2.0, 1.0, 1.5}, {32, 16, 24}, true, 0);
    auto t = boundary_content(torus);
    EXPECT_NEAR(t.value, 2 * 1.0 * 1.5, 0.01 * 3.0);
    auto box = half_slab({2.0, 1.0, 1.5}, {32, 16, 24}, false, 0);
    EXPECT_NEAR(boundary_content(box).value, 1.5, 0.01 * 1.5);
}

TEST(BoundaryContent, SquareInSquare) {
    const int r = 64;
    auto f = empty_field({1.0, 1.0}, {r, r}, false);
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto c = f.cell(i);
        f.cells[i] = c[0] >= 16 && c[0] < 48 && c[1] >= 16 && c[1] < 48;
    }
    EXPECT_NEAR(boundary_content(f).value, 2.0, 0.02);
}

TEST(BoundaryContent, DiskLiesBetweenSmoothAndStaircasePerimeters) {
    const int r = 128;
    auto f = empty_field({1.0, 1.0}, {r, r}, false);
    double rad = 0.3;
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto c = f.cell(i);
        double x = (c[0] + 0.5) / r - 0.5, y = (c[1] + 0.5) / r - 0.5;
        f.cells[i] = x * x + y * y < rad * rad;
    }
    double v = boundary_content(f).value;
    EXPECT_GE(v, 0.99 * 2 * std::numbers::pi * rad);
    EXPECT_LE(v, 8 * rad);
}

TEST(BoundaryContent, NeedsTwoRadii) {
    auto f = half_slab({1.0, 1.0}, {8, 8}, true, 0);
    EXPECT_THROW(boundary_content(f, {2.0}), UsageError);
}
