#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "waistlab/estimate.hpp"
#include "waistlab/linalg.hpp"
#include "waistlab/rng.hpp"

namespace waistlab {

// Cubical grid of [0,1]^n with `cells` subdivisions per axis; side l = 1/cells,
// p = cells^n. The dual grid is shifted by l/2 in every coordinate.
struct Grid {
    int n = 2;
    int cells = 1;

    double side() const { return 1.0 / cells; }
    std::int64_t p() const;
    // Number of d-faces of the primal grid: C(n,d) cells^d (cells+1)^{n-d}.
    std::int64_t face_count(int d) const;
};

// Join coordinates of a point q in the tile phi * eta: q = (1-t) x + t y with
// x on the primal (n-k)-face phi and y on the dual (k-1)-face eta.
struct TileCoords {
    std::vector<int> cell;     // grid cell containing q
    std::vector<int> fixed;    // coordinates held at the cell boundary on phi (k of them)
    std::vector<int> signs;    // side of the cell for each fixed coordinate
    int pivot = 0;             // the fixed coordinate also pinned to the centre on eta
    Vec x, y;
    double t = 0.0;
};

TileCoords tile_decompose(const Grid& g, int k, const Vec& q);

// Collapses everything outside the epsilon-collar of the dual (k-1)-skeleton
// onto the primal (n-k)-skeleton and stretches the collar over the tile.
Vec psi_epsilon(const Grid& g, int k, double eps, const Vec& q);

// Parallel (n-k)-flats {q : U^T q = c_i}, U an orthonormal n x k frame.
struct FlatFamily {
    Mat normal;              // U
    std::vector<Vec> offsets;  // c_i in R^k
};

struct DeformResult {
    double eps = 0.0;
    double z1 = 0.0;
    double z2 = 0.0;
    double total = 0.0;
    std::int64_t faces_hit = 0;
    int max_components = 0;  // components of a flat inside the collar
};

// k = 1: epsilon below the threshold at which one flat can meet two collar
// cubes (half of it). k >= 2: 1/8; cup_bound_check halves it until no flat
// meets the collar in more than k components.
double choose_epsilon(const Grid& g, int k, const Mat& normal);

DeformResult deform_family(const FlatFamily& family, const Grid& g, double eps, int resolution);

// Volume of (point + span(directions)) cap the box [lo, hi]; flats of
// dimension 1, or dimension 2 in R^3.
double flat_box_section(const Vec& point, const Mat& directions, const Vec& lo, const Vec& hi);

struct TrialRow {
    int trial = 0;
    Vec direction;
    double eps = 0.0;
    double z1 = 0.0, z2 = 0.0, total = 0.0;
};

struct CupReport {
    int n = 2, k = 1, cells = 1;
    std::int64_t p = 1;
    std::vector<TrialRow> rows;
    double max_total = 0.0, max_z1 = 0.0, max_z2 = 0.0, min_total = 0.0;
    double upper_bound = 0.0;    // 2^{n+k} C(n,k) p^{k/n}
    double lower_reference = 0.0;  // p^{k/n}
    double min_partition_section = 0.0;  // smallest central section of a subcube, over l^{n-k}
    int max_components = 0;
    bool pass = false;
};

// Regimes (2,1), (3,1), (3,2) with cells <= 8.
CupReport cup_bound_check(int n, int k, int cells, int trials, std::uint64_t seed, int resolution = 16);

void write_trial_csv(std::ostream& out, const CupReport& report);

// Random degree-d polynomial in two variables.
struct Polynomial2 {
    int degree = 0;
    std::vector<double> coeffs;  // monomials X^i Y^j in X = 2x-1, Y = 2y-1, i + j <= degree, ordered by (i+j, j)
    double operator()(double x, double y) const;
};

Polynomial2 random_polynomial(int degree, Rng& rng);
// A nonzero polynomial of the least degree vanishing at all points.
Polynomial2 interpolating_polynomial(const std::vector<Vec>& points, Rng& rng);

// Crossings of the line origin + s dir with the zero set, inside [0,1]^2.
int count_line_roots(const Polynomial2& poly, const Vec& origin, const Vec& dir);

// Cauchy-Crofton length of the zero set in [0,1]^2.
EstimateReport algebraic_family_volume(const Polynomial2& poly, std::int64_t lines, std::uint64_t seed,
                                       int workers = 1);

}  // namespace waistlab
