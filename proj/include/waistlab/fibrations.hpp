#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "waistlab/linalg.hpp"
#include "waistlab/mesh.hpp"
#include "waistlab/spaces.hpp"

namespace waistlab {

// Cayley-Dickson product on R^m, m in {1, 2, 4, 8}: (a,b)(c,d) = (ac - conj(d) b, d a + b conj(c)).
Vec cd_multiply(const Vec& x, const Vec& y);
Vec cd_conjugate(const Vec& x);

enum class FiberKind {
    LinearProjection,  // S^n -> R^k, p -> A p
    Hopf,              // S^{2m-1} -> S^m, m in {2, 4, 8}
    RpQuotient,        // even map descended to RP^n
    CpQuotient,        // quaternionic Hopf map descended to CP^3
    AbsZ1OnS3,
    AbsZ1OnRP3,
    X1SquaredOnRP2,
    TorusProjection,   // T_{a_1..a_n} -> T_{a_{n-k+1}..a_n}
};

class FiberMap {
public:
    static FiberMap linear_projection(int n, const Mat& rows);  // rows: k x (n+1), orthonormal
    static FiberMap hopf_3_2();
    static FiberMap hopf_7_4();
    static FiberMap hopf_15_8();
    static FiberMap rp_quotient(const FiberMap& upstairs);
    static FiberMap cp_quotient(const FiberMap& upstairs);
    static FiberMap abs_z1_on_s3();
    static FiberMap abs_z1_on_rp3();
    static FiberMap x1_squared_on_rp2();
    static FiberMap torus_projection(std::vector<double> lattice, int k);

    FiberKind kind() const { return kind_; }
    const SpaceDescriptor& source() const { return source_; }
    int target_dim() const { return target_dim_; }
    int fiber_dim() const { return fiber_dim_; }
    // Codimension of the fibres in the source.
    int codim() const { return source_.intrinsic_dim - fiber_dim_; }
    std::string name() const;

    Vec evaluate(const Vec& p) const;

    // Mesh of the fibre. Spherical meshes of RP^n / CP^n maps are the full
    // preimage in the covering sphere. Empty fibres give an empty mesh.
    SubmanifoldMesh fiber_mesh(const Vec& y, int resolution) const;

    // Closed-form fibre volume; 0 for empty or lower-dimensional fibres.
    double fiber_volume(const Vec& y) const;

    // Whether y is a point of the target (within kGeomTol).
    bool in_target(const Vec& y) const;

private:
    FiberKind kind_ = FiberKind::LinearProjection;
    SpaceDescriptor source_;
    int target_dim_ = 0;  // number of target coordinates
    int fiber_dim_ = 0;
    int algebra_ = 0;     // Hopf: 2, 4, 8
    Mat matrix_;          // linear projection rows
    std::shared_ptr<const FiberMap> upstairs_;
};

struct ProfilePoint {
    Vec y;
    double volume = 0.0;
};

struct WaistProfile {
    std::vector<ProfilePoint> points;
    std::size_t argmax = 0;
};

WaistProfile waist_profile(const FiberMap& map, const std::vector<Vec>& grid);

// Volume of the t-neighbourhood of a great d-sphere in S^n.
double great_sphere_tube_volume(int n, int d, double t);
// Volume of the t-neighbourhood of RP^d in RP^n.
double rp_tube_volume(int n, int d, double t);
// Volume of the t-neighbourhood of CP^d in CP^n (complex dimensions).
double cp_tube_volume(int n, int d, double t);

struct WaistCertificate {
    std::string map;
    std::string bound_ref;
    double bound = 0.0;
    double measured_sup = 0.0;
    Vec measured_at;
    bool lower_bound = true;
    double tolerance = 1e-6;
    bool pass = false;
    std::vector<std::pair<std::string, double>> details;
};

struct VerifyOptions {
    std::vector<double> t_schedule{0.05, 0.1, 0.2};
    std::int64_t samples = 40000;
    std::uint64_t seed = 1;
    int resolution = 6;
    int workers = 1;
};

// Bound tags: sphere-equator, even-map-pi, rp3-pi2, rpn-volume, rpn-nu-t,
// cpn-nu-t, torus-product, hopf-constant, x1sq-2pi.
WaistCertificate verify_waist_bound(const FiberMap& map, const std::string& bound_ref,
                                    const VerifyOptions& options = {});

// Sup of fiber_volume: grid scan plus golden-section refinement for scalar
// targets, deterministic sample points otherwise.
ProfilePoint measured_sup(const FiberMap& map);

}  // namespace waistlab
