#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "waistlab/rng.hpp"

namespace waistlab {

using QPoint = std::vector<mpq_class>;
// Vertices in lexicographic order; the order drives the prism staircase.
using QSimplex = std::vector<QPoint>;

// Mod-2 PL chain in [0,1]^n with exact rational vertices. Adding a simplex
// twice removes it. Simplices have distinct vertices but may be affinely
// flat (zero-volume pieces of the subdivision homotopy).
struct Mod2Chain {
    int dim = 0;
    int ambient = 0;
    std::set<QSimplex> simplices;

    void toggle(QSimplex s);  // sorts s; drops it if a vertex repeats
    void add(const Mod2Chain& other);
    std::size_t size() const { return simplices.size(); }
    bool empty() const { return simplices.empty(); }
    bool operator==(const Mod2Chain& other) const = default;
};

QSimplex make_simplex(std::vector<QPoint> vertices);
// Dyadic rational of a double (exact conversion).
mpq_class exact(double x);
QPoint exact_point(const std::vector<double>& x);

// Drops simplices lying in a facet of the cube (all vertices share a
// coordinate equal to 0 or to 1).
Mod2Chain relative(const Mod2Chain& z);
// Relative mod-2 boundary.
Mod2Chain boundary(const Mod2Chain& z);
bool is_relative_cycle(const Mod2Chain& z);

// Open cube corner + (0, edge)^n with rational data.
struct QCube {
    QPoint corner;
    mpq_class edge;
    bool operator==(const QCube& other) const = default;
};

struct CoverLedger {
    int k = 0;
    std::vector<QCube> cubes;

    mpq_class weight() const;  // sum of edge^k
    bool covers(const Mod2Chain& z) const;  // every simplex inside one cube
    bool operator==(const CoverLedger& other) const = default;
};

// One open cube per simplex around its bounding box, corners on the 2^-10
// lattice.
CoverLedger cover_chain(const Mod2Chain& z);
CoverLedger merge_covers(const CoverLedger& a, const CoverLedger& b);

// Midpoint of the leftmost interval of (0,1) minimizing
// S(t) = sum over cubes whose axis range contains t of edge^(k-1).
mpq_class choose_cut(const CoverLedger& cover, int axis);
mpq_class cut_cost(const CoverLedger& cover, int axis, const mpq_class& t);

// Staircase prism between z and its projection onto the facet x_axis = side.
Mod2Chain cone_to_facet(const Mod2Chain& z, int axis, int side);

// Pieces of z on either side of x_axis = t. A simplex inside the plane goes
// to the lower side.
struct CutResult {
    Mod2Chain lower, upper, slice;
};
CutResult cut_chain(const Mod2Chain& z, int axis, const mpq_class& t);

// Chain homotopy between a chain and its subdivision by x_axis = t:
// boundary(subdivision_homotopy(z)) = z + lower + upper for relative cycles z.
Mod2Chain subdivision_homotopy(const Mod2Chain& z, int axis, const mpq_class& t);

struct FillResult {
    Mod2Chain filling;
    CoverLedger ledger;  // dimension k+1
};

// Filling constant 2^{k+2} - 2.
std::int64_t filling_constant(int k);

// Relative (k+1)-chain H with boundary(H) = z. Cuts along `first_axis`, then
// recurses on the slice along the following axes.
FillResult fill(const Mod2Chain& z, const CoverLedger& cover, int first_axis = 0);

// Random relative k-cycle in [0,1]^n (n <= 3, k <= min(2, n-1)). Free vertex
// coordinates are odd multiples of 2^-20.
Mod2Chain random_relative_cycle(int n, int k, Rng& rng);

void write_chain(std::ostream& out, const Mod2Chain& z);
Mod2Chain read_chain(std::istream& in);
void write_ledger_csv(std::ostream& out, const CoverLedger& ledger);

// Abstract simplicial complex given by its top simplices over vertex labels.
struct AbstractComplex {
    std::vector<std::vector<int>> top;
    int dim() const;
};

AbstractComplex random_complex(int k, Rng& rng);

// Assignment f(sigma') = minimal element of each chain sigma' of the
// barycentric subdivision, and the sizes of N_v = {f(s) : s contains v}.
struct StarAssignment {
    int k = 0;
    std::size_t faces = 0;
    std::size_t chains = 0;
    int max_star = 0;
    std::int64_t stated_bound = 0;     // 2^k - 1
    std::int64_t corrected_bound = 0;  // 2^{k+1} - 1
    std::vector<std::pair<std::vector<int>, int>> assignment;  // chain of face ids -> face id
    std::vector<std::vector<int>> face_vertices;
};
StarAssignment star_assignment(const AbstractComplex& complex);

// Vertex-coloured grid with m points per axis in [0,1]^n; colour i marks the
// union C_i of the dual cells of its vertices (Freudenthal triangulation).
struct ColouredGrid {
    int n = 2;
    int m = 2;
    int parts = 1;
    std::vector<int> colour;  // m^n entries, axis 0 fastest
};

ColouredGrid random_coloured_grid(int n, int m, int parts, Rng& rng);

struct PartitionReport {
    int parts = 0;
    std::size_t index_sets = 0;
    std::size_t failures = 0;
    std::size_t nonempty = 0;
    bool holds = false;
};

// Checks boundary(C_I) = sum over i not in I of C_{I + i} for all index sets
// I with |I| <= n + 1.
PartitionReport partition_boundary_identity(const ColouredGrid& grid);
// The chain C_I.
Mod2Chain partition_chain(const ColouredGrid& grid, const std::vector<int>& index_set);

}  // namespace waistlab
