#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "waistlab/rng.hpp"

namespace waistlab {

// Runs f(i) for i in [0, chunks) on `workers` threads and returns the
// results in index order. Output never depends on the worker count.
template <class Result, class F>
std::vector<Result> run_chunks(std::size_t chunks, int workers, F&& f) {
    std::vector<Result> out(chunks);
    if (workers <= 1 || chunks <= 1) {
        for (std::size_t i = 0; i < chunks; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (std::size_t i = next++; i < chunks; i = next++) out[i] = f(i);
    };
    std::vector<std::thread> pool;
    int n = std::min<int>(workers, static_cast<int>(chunks));
    for (int w = 0; w < n; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    return out;
}

struct MeanAccumulator {
    double sum = 0.0;
    double sumsq = 0.0;
    std::int64_t n = 0;

    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++n;
    }
    void merge(const MeanAccumulator& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        n += o.n;
    }
    double mean() const { return n ? sum / n : 0.0; }
    double std_error() const {
        if (n < 2) return 0.0;
        double m = mean();
        double var = std::max(0.0, (sumsq / n - m * m)) * n / (n - 1);
        return std::sqrt(var / n);
    }
};

inline constexpr std::int64_t kChunkSize = 4096;

// Mean of draw(rng) over `samples` draws. Chunk c uses Rng::stream(seed, c)
// and chunks are merged in order, so the result is bit-reproducible.
template <class Draw>
MeanAccumulator sample_mean(std::int64_t samples, std::uint64_t seed, int workers, Draw&& draw) {
    std::size_t chunks = static_cast<std::size_t>((samples + kChunkSize - 1) / kChunkSize);
    auto parts = run_chunks<MeanAccumulator>(chunks, workers, [&](std::size_t c) {
        Rng rng = Rng::stream(seed, c);
        std::int64_t begin = static_cast<std::int64_t>(c) * kChunkSize;
        std::int64_t end = std::min(samples, begin + kChunkSize);
        MeanAccumulator acc;
        for (std::int64_t i = begin; i < end; ++i) acc.add(draw(rng, i));
        return acc;
    });
    MeanAccumulator total;
    for (const auto& p : parts) total.merge(p);
    return total;
}

}  // namespace waistlab
