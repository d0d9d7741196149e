#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace waistlab {

std::uint64_t splitmix64(std::uint64_t x);

// mt19937_64 with variates built from raw words, so streams are identical
// across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    // Independent stream `index` derived from `seed`.
    static Rng stream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next() { return engine_(); }
    double uniform();  // [0, 1)
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal();
    std::size_t below(std::size_t n);
    Eigen::VectorXd normal_vector(int n);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Worker count from WAISTLAB_WORKERS, else hardware concurrency.
int default_worker_count();

}  // namespace waistlab
