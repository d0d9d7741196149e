#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "waistlab/linalg.hpp"

namespace waistlab {

// Embedded simplicial d-mesh. On spheres the vertices are unit vectors and
// simplices stand for the geodesic simplices they span.
struct SubmanifoldMesh {
    int dim = 0;             // intrinsic dimension d
    int ambient = 0;         // number of vertex coordinates
    bool spherical = false;  // vertices on the unit sphere of R^ambient
    std::vector<Vec> vertices;
    std::vector<std::vector<int>> simplices;

    Mat simplex_matrix(std::size_t i) const;  // ambient x (d+1), vertex columns
    double simplex_volume(std::size_t i) const;
    double volume() const;
    void validate() const;  // throws UsageError

    void append(const SubmanifoldMesh& other);
};

// Text format: "dim n d [sphere|euclidean]", "v x...", "s i0 ... id".
// Spherical meshes carry n+1 coordinates, euclidean meshes n.
void write_mesh(std::ostream& out, const SubmanifoldMesh& mesh);
SubmanifoldMesh read_mesh(std::istream& in);
SubmanifoldMesh load_mesh(const std::string& path);
void save_mesh(const std::string& path, const SubmanifoldMesh& mesh);

// Great d-sphere spanned by the orthonormal columns of `frame` (ambient x (d+1)):
// radial projection of the Kuhn-triangulated boundary of [-1,1]^{d+1} with m
// subdivisions per edge.
SubmanifoldMesh great_sphere_mesh(const Mat& frame, int m);

// Closed or open polyline through the given points.
SubmanifoldMesh polyline_mesh(const std::vector<Vec>& points, bool closed, bool spherical);

// Triangulated image of a (u, v) grid; periodic directions are glued.
SubmanifoldMesh surface_mesh(const std::function<Vec(double, double)>& param, int nu, int nv,
                             bool periodic_u, bool periodic_v, bool spherical);

}  // namespace waistlab
