#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "waistlab/estimate.hpp"
#include "waistlab/rng.hpp"

namespace waistlab {

// Occupancy grid over a torus (periodic) or box. Cell (i_0, ..., i_{n-1})
// has flat index sum i_j * stride_j with axis 0 fastest.
struct BinaryField {
    std::vector<int> resolution;
    std::vector<double> lengths;
    bool periodic = true;
    std::vector<std::uint8_t> cells;

    int dims() const { return static_cast<int>(resolution.size()); }
    std::size_t size() const { return cells.size(); }
    double cell_volume() const;
    double spacing(int axis) const { return lengths[axis] / resolution[axis]; }
    double occupancy() const;  // occupied fraction
    std::size_t index(const std::vector<int>& cell) const;
    std::vector<int> cell(std::size_t index) const;
    void validate() const;  // throws UsageError
};

BinaryField empty_field(std::vector<double> lengths, std::vector<int> resolution, bool periodic);

// {x_axis < a_axis / 2}.
BinaryField half_slab(std::vector<double> lengths, std::vector<int> resolution, bool periodic, int axis);

// Sub-level set of a smooth random trigonometric field, thresholded so that
// exactly half of the cells are occupied.
BinaryField random_half_volume(std::vector<double> lengths, std::vector<int> resolution, bool periodic, Rng& rng);

// Text header ("binaryfield", dims, resolution, lengths, periodic, data) then one byte per cell.
void write_field(std::ostream& out, const BinaryField& field);
BinaryField read_field(std::istream& in);
void save_field(const std::string& path, const BinaryField& field);
BinaryField load_field(const std::string& path);

// int_{-t}^{t} exp(-pi s^2) ds.
double gaussian_profile(double t);

// Box of extent[j] cells starting (cyclically) at start[j].
struct HalvingBox {
    std::vector<int> start;
    std::vector<int> extent;
    double occupancy = 0.0;  // fraction of the box inside M
};

// Recursive halving: shift along axis 0 so that a half-torus slab holds half
// of its volume in M, then split each slab along axis 1, and so on.
std::vector<HalvingBox> torus_halving_translations(const BinaryField& field);

// Every cell covered exactly once.
bool boxes_tile(const BinaryField& field, const std::vector<HalvingBox>& boxes);

// Squared Euclidean distance from each cell centre to the nearest centre of
// a cell with target[i] != 0 (infinity when there is none).
std::vector<double> squared_distance_transform(const BinaryField& shape, const std::vector<std::uint8_t>& target);

// Minkowski content of the grid interface of M from vol(nu_t dM) / (2t) at
// t = multiples[i] * (largest cell spacing), extrapolated linearly to t = 0.
EstimateReport boundary_content(const BinaryField& field, const std::vector<double>& multiples = {2, 4, 6, 8});

}  // namespace waistlab
