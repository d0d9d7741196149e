#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "waistlab/linalg.hpp"
#include "waistlab/rng.hpp"

namespace waistlab {

inline constexpr double kExactTol = 1e-12;
inline constexpr double kGeomTol = 1e-9;

double ball_volume(int k);    // v_k
double sphere_volume(int i);  // s_i = (i+1) v_{i+1}

enum class SpaceKind { Sphere, Ball, Cube, Torus, RealProjective, ComplexProjective, ConvexBody };

std::string to_string(SpaceKind kind);

// Membership oracle plus bounding box for convex-body spaces.
struct BodyHandle {
    std::function<bool(const Vec&)> contains;
    Vec lower;
    Vec upper;
};

struct SpaceDescriptor {
    SpaceKind kind = SpaceKind::Sphere;
    int intrinsic_dim = 1;
    int ambient_dim = 2;
    std::vector<double> lengths;  // cube sides or torus lattice lengths
    std::shared_ptr<const BodyHandle> body;

    static SpaceDescriptor sphere(int n);
    static SpaceDescriptor ball(int n);
    static SpaceDescriptor cube(int n, double side = 1.0);
    static SpaceDescriptor cube(std::vector<double> sides);
    static SpaceDescriptor torus(std::vector<double> lattice);
    static SpaceDescriptor real_projective(int n);
    static SpaceDescriptor complex_projective(int n);
    static SpaceDescriptor convex_body(int n, std::shared_ptr<const BodyHandle> body);

    // Total Riemannian volume (convex bodies: bounding-box estimate is not
    // provided, throws).
    double volume() const;
};

// First coordinate with |x_i| > tol made positive.
Vec canonicalize_projective(const Vec& p);

// Reduces torus coordinates into [0, a_i).
Vec reduce_torus(const SpaceDescriptor& space, const Vec& p);

double geodesic_distance(const SpaceDescriptor& space, const Vec& p, const Vec& q);

Vec sample_uniform(const SpaceDescriptor& space, Rng& rng);

}  // namespace waistlab
