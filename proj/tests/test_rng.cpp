#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "waistlab/parallel.hpp"
#include "waistlab/rng.hpp"

using namespace waistlab;

namespace {

// Reference splitmix64 (Vigna), written out independently.
std::uint64_t reference_splitmix(std::uint64_t state) {
    std::uint64_t z = state + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

TEST(Splitmix, MatchesReference) {
    EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafull);
    for (std::uint64_t s : {1ull, 42ull, 0xdeadbeefull, ~0ull}) EXPECT_EQ(splitmix64(s), reference_splitmix(s));
}

TEST(Rng, SameSeedSameStream) {
    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
    Rng c(8);
    Rng d(7);
    int equal = 0;
    for (int i = 0; i < 100; ++i) equal += c.next() == d.next();
    EXPECT_EQ(equal, 0);
}

TEST(Rng, StreamsDiffer) {
    std::set<std::uint64_t> first;
    for (std::uint64_t i = 0; i < 64; ++i) first.insert(Rng::stream(3, i).next());
    EXPECT_EQ(first.size(), 64u);
    EXPECT_NE(Rng::stream(3, 0).next(), Rng::stream(4, 0).next());
}

TEST(Rng, UniformRangeAndMoments) {
    Rng r(11);
    const int n = 200000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < n; ++i) {
        double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sumsq += u * u;
    }
    EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(sumsq / n, 1.0 / 3, 0.005);
}

TEST(Rng, NormalMoments) {
    Rng r(12);
    const int n = 200000;
    double m1 = 0, m2 = 0, m4 = 0;
    for (int i = 0; i < n; ++i) {
        double x = r.normal();
        m1 += x;
        m2 += x * x;
        m4 += x * x * x * x;
    }
    EXPECT_NEAR(m1 / n, 0.0, 0.015);
    EXPECT_NEAR(m2 / n, 1.0, 0.02);
    EXPECT_NEAR(m4 / n, 3.0, 0.1);
}

TEST(Rng, BelowIsUniformOnRange) {
    Rng r(13);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        auto k = r.below(7);
        ASSERT_LT(k, 7u);
        ++counts[k];
    }
    for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(SampleMean, IndependentOfWorkerCount) {
    auto draw = [](Rng& rng, std::int64_t) { return rng.normal() + rng.uniform(); };
    auto one = sample_mean(50000, 5, 1, draw);
    for (int w : {2, 3, 8}) {
        auto many = sample_mean(50000, 5, w, draw);
        EXPECT_EQ(one.sum, many.sum);
        EXPECT_EQ(one.sumsq, many.sumsq);
        EXPECT_EQ(one.n, many.n);
    }
    EXPECT_NEAR(one.mean(), 0.5, 5 * one.std_error());
}

TEST(SampleMean, StdErrorOfConstantIsZero) {
    auto acc = sample_mean(10000, 1, 1, [](Rng&, std::int64_t) { return 2.5; });
    EXPECT_DOUBLE_EQ(acc.mean(), 2.5);
    EXPECT_DOUBLE_EQ(acc.std_error(), 0.0);
}

TEST(RunChunks, KeepsIndexOrder) {
    auto out = run_chunks<int>(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
}
