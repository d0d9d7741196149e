#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "waistlab/estimate.hpp"
#include "waistlab/linalg.hpp"
#include "waistlab/mesh.hpp"
#include "waistlab/spaces.hpp"

namespace waistlab {

// Open axis-aligned cube corner + (0, edge)^n.
struct Cube {
    Vec corner;
    double edge = 0.0;
};

struct CubeCover {
    std::vector<Cube> cubes;
    bool contains(const Vec& p) const;
};

double hausdorff_cover_weight(const CubeCover& cover, int k);

// Feasible cover by open cubes of edge exactly max_edge: grid cells of pitch
// max_edge/(1 + 1/16) met by the mesh, each grown to a cube of edge max_edge.
CubeCover greedy_cover(const SubmanifoldMesh& mesh, double max_edge);

// Closest point of the simplex with vertex columns S to p.
Vec nearest_point_on_simplex(const Vec& p, const Mat& simplex);

// Distance from points to a mesh: Euclidean for euclidean meshes, geodesic
// angle to the chordal nearest point for spherical ones.
class MeshDistance {
public:
    explicit MeshDistance(const SubmanifoldMesh& mesh);
    ~MeshDistance();
    MeshDistance(MeshDistance&&) noexcept;

    // min(distance, cutoff).
    double distance(const Vec& p, double cutoff) const;
    // (min(distance, cutoff), index of the nearest simplex or -1 beyond the cutoff).
    std::pair<double, int> nearest(const Vec& p, double cutoff) const;
    const SubmanifoldMesh& mesh() const { return mesh_; }

private:
    struct Impl;
    SubmanifoldMesh mesh_;
    std::unique_ptr<Impl> impl_;
};

enum class TubeSampler {
    Uniform,  // uniform points of the whole space
    Local,    // normal prisms over each simplex, each point credited to its nearest simplex
};

struct TubeOptions {
    TubeSampler sampler = TubeSampler::Uniform;
    int workers = 1;
};

// vol(nu_t X). Spherical meshes live in spheres; for RP^n the mesh is the
// full preimage in S^n, for CP^n the Hopf-invariant preimage in S^{2n+1}.
EstimateReport neighborhood_volume(const SpaceDescriptor& space, const SubmanifoldMesh& mesh, double t,
                                   std::int64_t samples, std::uint64_t seed, const TubeOptions& options = {});

using DistanceOracle = std::function<double(const Vec&)>;

EstimateReport neighborhood_volume(const SpaceDescriptor& space, const DistanceOracle& distance, double t,
                                   std::int64_t samples, std::uint64_t seed, int workers = 1);

struct MinkowskiOptions {
    int order = 1;  // degree of the polynomial fit in t
    TubeSampler sampler = TubeSampler::Uniform;
    int workers = 1;
};

// Extrapolates vol(nu_t X) / (v_k t^k) to t = 0 by weighted least squares.
EstimateReport lower_minkowski_content(const SpaceDescriptor& space, const SubmanifoldMesh& mesh, int k,
                                       const std::vector<double>& schedule, std::int64_t samples,
                                       std::uint64_t seed, const MinkowskiOptions& options = {});

}  // namespace waistlab
