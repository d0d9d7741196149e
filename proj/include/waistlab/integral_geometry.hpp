#pragma once

#include <cstdint>
#include <functional>

#include "waistlab/estimate.hpp"
#include "waistlab/linalg.hpp"
#include "waistlab/mesh.hpp"
#include "waistlab/rng.hpp"

namespace waistlab {

// Unit sphere of the span of `frame` ((n+1) x (k+1), orthonormal columns).
struct EquatorialSubsphere {
    Mat frame;
};

EquatorialSubsphere sample_equator(int n, int k, Rng& rng);

struct IntersectionCount {
    int count = 0;
    bool degenerate = false;  // some crossing within tolerance of a simplex face
};

// Crossings of the geodesic simplices of a codim-k mesh in S^n with E.
IntersectionCount count_intersections(const SubmanifoldMesh& mesh, const EquatorialSubsphere& e);

// (1/2) s_{n-k} E[#(E cap mesh)] over Haar-random k-equators.
EstimateReport crofton_volume(const SubmanifoldMesh& mesh, int k, std::int64_t samples, std::uint64_t seed,
                              int workers = 1);

// Counts the crossings of the affine k-flat origin + span(directions) with a set.
using FlatCounter = std::function<int(const Vec& origin, const Mat& directions)>;

// E_L |det| of the projection of a unit (n-k)-flat onto the complement of a
// Haar-random k-subspace; the Euclidean Crofton normalization.
double euclidean_crofton_calibration(int n, int k);

// Volume of an (n-k)-dimensional set inside the box [lower, upper] from
// crossing counts with random k-flats meeting the circumscribed ball.
EstimateReport cauchy_crofton(int n, int k, const Vec& lower, const Vec& upper, const FlatCounter& counter,
                              std::int64_t samples, std::uint64_t seed, int workers = 1);

EstimateReport cauchy_crofton_euclidean(const SubmanifoldMesh& mesh, int k, const Vec& lower, const Vec& upper,
                                        std::int64_t samples, std::uint64_t seed, int workers = 1);

// Crossings of the flat with one simplex (vertex columns), generic position.
bool flat_meets_simplex(const Vec& origin, const Mat& directions, const Mat& simplex);

}  // namespace waistlab
