#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "waistlab/estimate.hpp"
#include "waistlab/linalg.hpp"
#include "waistlab/spaces.hpp"

namespace waistlab {

enum class BodyKind { PBall, Polytope, Box, ProductOfBalls };

class ConvexBody {
public:
    static ConvexBody p_ball(int n, double p, double radius = 1.0);  // p = inf allowed
    static ConvexBody polytope(std::vector<Vec> vertices);           // convex hull
    static ConvexBody box(const Vec& half_widths);                    // centred
    static ConvexBody cube(int n, double side = 1.0);                // centred
    static ConvexBody cross_polytope(int n);                         // |x|_1 <= 1
    // Product of balls B^{n_i} of unit n_i-volume.
    static ConvexBody product_of_balls(std::vector<int> dims);

    int dim() const { return n_; }
    bool symmetric() const { return symmetric_; }
    BodyKind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    double support(const Vec& u) const;
    bool contains(const Vec& x) const;
    // sup { r : r u in K } for a unit u; requires 0 in the interior.
    double radial(const Vec& u) const;

    ConvexBody scaled(double factor) const;
    double scale() const { return scale_; }
    Vec lower() const;
    Vec upper() const;

    // Exact volume where a closed form exists, otherwise negative.
    double exact_volume() const;

    SpaceDescriptor as_space() const;

    // Facet normals and offsets of a polytope (a . x <= b).
    const std::vector<Vec>& facet_normals() const { return normals_; }
    const std::vector<double>& facet_offsets() const { return offsets_; }

private:
    double support0(const Vec& u) const;
    bool contains0(const Vec& x) const;
    double radial0(const Vec& u) const;

    BodyKind kind_ = BodyKind::PBall;
    int n_ = 0;
    double p_ = 2.0;
    double radius_ = 1.0;
    Vec half_;
    std::vector<int> dims_;
    std::vector<double> radii_;
    std::vector<Vec> vertices_;
    std::vector<Vec> normals_;
    std::vector<double> offsets_;
    double scale_ = 1.0;
    bool symmetric_ = true;
    std::string name_;
};

struct DirectionalValue {
    double value = 0.0;
    Vec direction;
};

// min_u h(u) + h(-u) by multi-start pattern search over the sphere.
DirectionalValue width(const ConvexBody& body, int iterations = 64);

// Largest centred inscribed ball radius and its contact direction.
DirectionalValue inscribed_touching_pair(const ConvexBody& body, int iterations = 64);

// vol_m(K cap (offset + span(frame))) for an orthonormal n x m frame.
EstimateReport central_section_volume(const ConvexBody& body, const Mat& frame, std::int64_t samples,
                                      std::uint64_t seed, int workers = 1, const Vec& offset = Vec());

EstimateReport body_volume(const ConvexBody& body, std::int64_t samples, std::uint64_t seed, int workers = 1);

struct ProfileCheck {
    bool pass = false;
    std::vector<double> offsets;
    std::vector<EstimateReport> values;
    std::string failure;
};

// Sections by L + s v along the grid of s, with v projected off L. Passes
// when the profile peaks at s = 0 and decreases in |s| within 3 sigma.
ProfileCheck section_profile_logconcavity_check(const ConvexBody& body, const Mat& frame, const Vec& direction,
                                                const std::vector<double>& grid, std::int64_t samples,
                                                std::uint64_t seed, int workers = 1);

struct SectionSearch {
    Mat frame;
    EstimateReport start;
    EstimateReport best;   // fresh estimate at the best frame
    double scale = 1.0;    // factor applied to reach volume v_n
    double normalization_error = 0.0;  // relative error of the section volumes due to scaling
    double bound = 0.0;    // v_{n-k}
    bool pass = false;
};

// Searches central (n-k)-sections of K scaled to volume v_n for one of volume <= v_{n-k}.
SectionSearch min_section_search(const ConvexBody& body, int k, int restarts, std::int64_t samples,
                                 std::uint64_t seed, int workers = 1);

}  // namespace waistlab
