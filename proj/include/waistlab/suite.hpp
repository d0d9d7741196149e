#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "waistlab/report.hpp"

namespace waistlab {

// Criterion names in run order.
const std::vector<std::string>& suite_criteria();

struct SuiteOptions {
    std::uint64_t seed = 1;
    std::vector<std::string> only;  // empty: all criteria
    int workers = 1;
};

// Runs the acceptance matrix; each criterion draws its seed from
// (options.seed, criterion index).
ReportDocument run_suite(const SuiteOptions& options);

std::vector<Record> check_vaaler(int n_min, int n_max, int sections, std::int64_t samples, std::uint64_t seed,
                                 int workers = 1);
std::vector<Record> check_crofton(std::int64_t samples, std::uint64_t seed, int workers = 1);
std::vector<Record> check_transport(int points, int pairs, std::uint64_t seed);
std::vector<Record> check_archimedes();
std::vector<Record> check_pullback();
std::vector<Record> check_fibrations(std::int64_t samples, std::uint64_t seed, int workers = 1);
std::vector<Record> check_torus(int resolution);
std::vector<Record> check_parallelotope(int sets, int resolution, std::uint64_t seed);
std::vector<Record> check_convex(std::int64_t samples, std::uint64_t seed, int workers = 1);
std::vector<Record> check_bending(int max_cells, int trials, std::uint64_t seed);
std::vector<Record> check_cup_power(int max_cells, int trials, std::uint64_t seed);
std::vector<Record> check_algebraic(std::int64_t lines, std::uint64_t seed, int workers = 1);
// Pairs of random relative cycles sharing a cover, spread over (n, k) with
// n <= 3, k <= 2.
std::vector<Record> check_filling(int cycles, std::uint64_t seed);
std::vector<Record> check_star_assignment(int complexes, int max_k, std::uint64_t seed);
std::vector<Record> check_partition(int grids, std::uint64_t seed);

}  // namespace waistlab
