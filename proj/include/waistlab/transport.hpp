#pragma once

#include <memory>
#include <string>
#include <vector>

#include "waistlab/linalg.hpp"

namespace waistlab {

// y(x) = int_0^x exp(-pi s^2) ds.
double gauss_to_interval(double x);

// y solving y^n = int_0^x n r^{n-1} exp(-pi r^2) dr.
double gauss_to_ball_radial(double x, int n);

// Inverse of gauss_to_ball_radial: x with gauss_to_ball_radial(x, n) = y.
double ball_to_gauss_radial(double y, int n);

enum class MapKind { GaussToInterval, GaussToBall, Product, CoordinateScale, ArchimedesProjection };

class TransportMap {
public:
    static TransportMap gauss_to_interval();
    static TransportMap gauss_to_ball(int n);
    static TransportMap product(std::vector<TransportMap> blocks);
    static TransportMap coordinate_scale(int dim, double factor);
    // S^{n+m} in R^{n+m+1} -> B^n, dropping the last m+1 coordinates.
    static TransportMap archimedes_projection(int n, int m);

    // Product of `n` copies of gauss_to_interval: R^n -> (-1/2, 1/2)^n.
    static TransportMap cube_transport(int n);

    MapKind kind() const { return kind_; }
    int domain_dim() const { return domain_dim_; }      // ambient dimension of the domain
    int codomain_dim() const { return codomain_dim_; }
    int tangent_dim() const;                           // intrinsic dimension of the domain
    bool gaussian_domain() const;                      // pushes the standard Gaussian exp(-pi|x|^2)
    std::string name() const;

    Vec apply(const Vec& p) const;

    // Differential on the tangent space, as a codomain_dim x tangent_dim
    // matrix in the basis returned by tangent_basis(p).
    Mat jacobian(const Vec& p) const;
    Mat tangent_basis(const Vec& p) const;

private:
    MapKind kind_ = MapKind::GaussToInterval;
    int domain_dim_ = 1;
    int codomain_dim_ = 1;
    int n_ = 1;
    int m_ = 0;
    double factor_ = 1.0;
    std::vector<TransportMap> blocks_;
};

struct JacobianSpectrum {
    Vec singular_values;  // descending
    Vec point;
};

JacobianSpectrum jacobian_singular_values(const TransportMap& map, const Vec& p);

// sqrt(det(A^T A)) with A the differential applied to the orthonormal frame L
// (columns in ambient coordinates of the domain, tangent at p).
double restricted_determinant(const TransportMap& map, const Vec& p, const Mat& frame);

// Named 1-Lipschitz maps used by the certificate checks.
std::vector<TransportMap> builtin_maps();

double density_mu_m(int n, int m, const Vec& x);
double density_rho_m(int m, const Vec& y);
double gaussian_density(const Vec& p);

}  // namespace waistlab
