#include "waistlab/content.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "waistlab/errors.hpp"
#include "waistlab/parallel.hpp"

namespace waistlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Bounding-ball hierarchy over items with (center, radius).
class BallTree {
public:
    BallTree() = default;
    BallTree(std::vector<Vec> centers, std::vector<double> radii)
        : centers_(std::move(centers)), radii_(std::move(radii)), order_(centers_.size()) {
        std::iota(order_.begin(), order_.end(), 0);
        if (!order_.empty()) build(0, static_cast<int>(order_.size()));
    }

    // Calls f(i) for every item whose ball lies within r of p.
    template <class F>
    void query(const Vec& p, double r, F&& f) const {
        if (nodes_.empty()) return;
        visit(0, p, r, f);
    }

private:
    struct Node {
        Vec center;
        double radius = 0.0;
        int begin = 0, end = 0;
        int left = -1, right = -1;
    };

    int build(int begin, int end) {
        int id = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        Vec c = Vec::Zero(centers_[0].size());
        for (int i = begin; i < end; ++i) c += centers_[order_[i]];
        c /= (end - begin);
        double r = 0.0;
        for (int i = begin; i < end; ++i) r = std::max(r, (centers_[order_[i]] - c).norm() + radii_[order_[i]]);
        Node node;
        node.center = c;
        node.radius = r;
        node.begin = begin;
        node.end = end;
        if (end - begin > 8) {
            Vec lo = centers_[order_[begin]], hi = lo;
            for (int i = begin; i < end; ++i) {
                lo = lo.cwiseMin(centers_[order_[i]]);
                hi = hi.cwiseMax(centers_[order_[i]]);
            }
            Eigen::Index axis;
            (hi - lo).maxCoeff(&axis);
            int mid = (begin + end) / 2;
            std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                             [&](int a, int b) { return centers_[a][axis] < centers_[b][axis]; });
            node.left = build(begin, mid);
            node.right = build(mid, end);
        }
        nodes_[id] = std::move(node);
        return id;
    }

    template <class F>
    void visit(int id, const Vec& p, double r, F& f) const {
        const Node& node = nodes_[id];
        if ((p - node.center).norm() > node.radius + r) return;
        if (node.left < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                int item = order_[i];
                if ((p - centers_[item]).norm() <= radii_[item] + r) f(item);
            }
            return;
        }
        visit(node.left, p, r, f);
        visit(node.right, p, r, f);
    }

    std::vector<Vec> centers_;
    std::vector<double> radii_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
};

double angle_between(const Vec& p, const Vec& q) {
    double c = p.dot(q);
    double s = (q - c * p).norm();
    return std::atan2(s, c);
}

bool sphere_based(SpaceKind kind) {
    return kind == SpaceKind::Sphere || kind == SpaceKind::RealProjective || kind == SpaceKind::ComplexProjective;
}

// Volume of the space divided by the volume of the sphere it is sampled on.
double lift_factor(const SpaceDescriptor& space) {
    switch (space.kind) {
        case SpaceKind::RealProjective: return 0.5;
        case SpaceKind::ComplexProjective: return 1.0 / (2.0 * kPi);
        default: return 1.0;
    }
}

bool inside_space(const SpaceDescriptor& space, const Vec& p) {
    switch (space.kind) {
        case SpaceKind::Cube:
            for (int i = 0; i < p.size(); ++i)
                if (p[i] < 0.0 || p[i] > space.lengths[i]) return false;
            return true;
        case SpaceKind::Ball: return p.norm() <= 1.0;
        case SpaceKind::ConvexBody: return space.body->contains(p);
        default: return true;
    }
}

void check_mesh_fits(const SpaceDescriptor& space, const SubmanifoldMesh& mesh) {
    if (mesh.ambient != space.ambient_dim) throw UsageError("neighborhood_volume: mesh and space dimensions differ");
    if (mesh.spherical != sphere_based(space.kind))
        throw UsageError("neighborhood_volume: spherical meshes belong to sphere-based spaces");
}

}  // namespace

bool CubeCover::contains(const Vec& p) const {
    for (const auto& c : cubes)
        if ((p.array() > c.corner.array()).all() && (p.array() < c.corner.array() + c.edge).all()) return true;
    return false;
}

double hausdorff_cover_weight(const CubeCover& cover, int k) {
    if (k < 0) throw DomainError("hausdorff_cover_weight: k must be nonnegative");
    double w = 0.0;
    for (const auto& c : cover.cubes) w += std::pow(c.edge, k);
    return w;
}

CubeCover greedy_cover(const SubmanifoldMesh& mesh, double max_edge) {
    if (!(max_edge > 0)) throw DomainError("greedy_cover: max_edge must be positive");
    const double pitch = max_edge / (1.0 + 1.0 / 16.0);
    const double margin = 0.5 * (max_edge - pitch);
    std::set<std::vector<long>> cells;
    auto mark = [&](const Vec& x) {
        std::vector<long> key(static_cast<std::size_t>(x.size()));
        for (int i = 0; i < x.size(); ++i) key[i] = static_cast<long>(std::floor(x[i] / pitch));
        cells.insert(std::move(key));
    };
    for (std::size_t s = 0; s < mesh.simplices.size(); ++s) {
        Mat S = mesh.simplex_matrix(s);
        const int d = static_cast<int>(S.cols()) - 1;
        double diam = 0.0;
        for (int a = 0; a <= d; ++a)
            for (int b = a + 1; b <= d; ++b) diam = std::max(diam, (S.col(a) - S.col(b)).norm());
        const int steps = static_cast<int>(std::ceil(diam / margin)) + 1;
        // Barycentric lattice points with coordinates i_j / steps.
        std::vector<int> idx(static_cast<std::size_t>(d + 1), 0);
        std::function<void(int, int)> rec = [&](int j, int left) {
            if (j == d) {
                idx[d] = left;
                Vec x = Vec::Zero(S.rows());
                for (int a = 0; a <= d; ++a) x += (static_cast<double>(idx[a]) / steps) * S.col(a);
                mark(x);
                return;
            }
            for (int i = 0; i <= left; ++i) {
                idx[j] = i;
                rec(j + 1, left - i);
            }
        };
        rec(0, steps);
    }
    CubeCover cover;
    for (const auto& key : cells) {
        Vec corner(static_cast<int>(key.size()));
        for (std::size_t i = 0; i < key.size(); ++i) corner[i] = key[i] * pitch - margin;
        cover.cubes.push_back({corner, max_edge});
    }
    return cover;
}

Vec nearest_point_on_simplex(const Vec& p, const Mat& S) {
    const int d = static_cast<int>(S.cols()) - 1;
    if (d == 0) return S.col(0);
    if (d == 1) {
        Vec e = S.col(1) - S.col(0);
        double len2 = e.squaredNorm();
        double a = len2 > 0 ? std::clamp(e.dot(p - S.col(0)) / len2, 0.0, 1.0) : 0.0;
        return S.col(0) + a * e;
    }
    Mat E = S.rightCols(d).colwise() - S.col(0);
    Vec a = (E.transpose() * E).ldlt().solve(E.transpose() * (p - S.col(0)));
    Vec lambda(d + 1);
    lambda[0] = 1.0 - a.sum();
    lambda.tail(d) = a;
    if ((lambda.array() >= 0).all()) return S.col(0) + E * a;
    Vec best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= d; ++i) {
        if (lambda[i] >= 0) continue;
        Mat facet(S.rows(), d);
        for (int c = 0, j = 0; c <= d; ++c)
            if (c != i) facet.col(j++) = S.col(c);
        Vec q = nearest_point_on_simplex(p, facet);
        double dist = (p - q).squaredNorm();
        if (dist < best_dist) {
            best_dist = dist;
            best = q;
        }
    }
    return best;
}

struct MeshDistance::Impl {
    std::vector<Mat> simplices;
    std::vector<Mat> span_coords;  // spherical: least-squares coordinates in the vertex basis
    BallTree tree;
    bool spherical = false;
    double sag = 0.0;  // 1 - min norm over the linear simplices (spherical only)
};

MeshDistance::MeshDistance(const SubmanifoldMesh& mesh) : mesh_(mesh), impl_(std::make_unique<Impl>()) {
    impl_->spherical = mesh.spherical;
    std::vector<Vec> centers;
    std::vector<double> radii;
    for (std::size_t s = 0; s < mesh.simplices.size(); ++s) {
        Mat S = mesh.simplex_matrix(s);
        Vec c = S.rowwise().mean();
        double r = 0.0;
        for (int a = 0; a < S.cols(); ++a) r = std::max(r, (S.col(a) - c).norm());
        centers.push_back(c);
        radii.push_back(r);
        if (mesh.spherical) {
            Vec q = nearest_point_on_simplex(Vec::Zero(S.rows()), S);
            impl_->sag = std::max(impl_->sag, 1.0 - q.norm());
            impl_->span_coords.push_back((S.transpose() * S).ldlt().solve(S.transpose()));
        }
        impl_->simplices.push_back(std::move(S));
    }
    impl_->tree = BallTree(std::move(centers), std::move(radii));
}

MeshDistance::~MeshDistance() = default;
MeshDistance::MeshDistance(MeshDistance&&) noexcept = default;

double MeshDistance::distance(const Vec& p, double cutoff) const { return nearest(p, cutoff).first; }

std::pair<double, int> MeshDistance::nearest(const Vec& p, double cutoff) const {
    double best = cutoff;
    int owner = -1;
    auto offer = [&](double d, int i) {
        if (d < best) {
            best = d;
            owner = i;
        }
    };
    if (!impl_->spherical) {
        impl_->tree.query(p, cutoff, [&](int i) {
            offer((p - nearest_point_on_simplex(p, impl_->simplices[i])).norm(), i);
        });
        return {best, owner};
    }
    double reach = cutoff >= kPi ? 4.0 : 2.0 * std::sin(0.5 * cutoff) + impl_->sag;
    impl_->tree.query(p, reach, [&](int i) {
        // Foot of p on the great sphere through the simplex; exact when it
        // falls inside the geodesic simplex.
        Vec lambda = impl_->span_coords[i] * p;
        if ((lambda.array() >= 0.0).all() && lambda.sum() > 0.0) {
            offer(angle_between(p, impl_->simplices[i] * lambda), i);
            return;
        }
        Vec q = nearest_point_on_simplex(p, impl_->simplices[i]);
        offer(q.norm() == 0.0 ? 0.5 * kPi : angle_between(p, q), i);
    });
    return {best, owner};
}

namespace {

// Normal prism over one simplex: points at distance r < t from a foot on
// the simplex, along the fixed normal space of its (great) affine span.
struct Prism {
    Mat vertices;
    Mat normal;
    double area = 0.0;    // flat volume of the simplex
    double height = 1.0;  // spherical: distance from 0 to the affine hull
};

std::vector<Prism> build_prisms(const SubmanifoldMesh& mesh) {
    std::vector<Prism> out;
    const int d = mesh.dim;
    for (std::size_t s = 0; s < mesh.simplices.size(); ++s) {
        Prism pr;
        pr.vertices = mesh.simplex_matrix(s);
        pr.area = mesh.simplex_volume(s);
        if (mesh.spherical) {
            pr.normal = orthogonal_complement(pr.vertices);
            Vec w = (pr.vertices.transpose() * pr.vertices).ldlt().solve(Vec::Ones(d + 1));
            pr.height = 1.0 / std::sqrt(w.sum());
        } else {
            Mat edges = pr.vertices.rightCols(d).colwise() - pr.vertices.col(0);
            pr.normal = d > 0 ? orthogonal_complement(edges) : Mat::Identity(mesh.ambient, mesh.ambient);
        }
        out.push_back(std::move(pr));
    }
    return out;
}

Vec uniform_barycentric(int count, Rng& rng) {
    Vec e(count);
    for (int i = 0; i < count; ++i) e[i] = -std::log1p(-rng.uniform());
    return e / e.sum();
}

EstimateReport local_tube_volume(const SpaceDescriptor& space, const SubmanifoldMesh& mesh, double t,
                                 std::int64_t samples, std::uint64_t seed, int workers) {
    if (space.kind == SpaceKind::Torus) throw UsageError("neighborhood_volume: local sampler is not available on tori");
    if (mesh.simplices.empty()) return {0.0, 0.0, samples, seed, "tube_local", {}};
    const int space_dim = mesh.spherical ? mesh.ambient - 1 : mesh.ambient;
    const int d = mesh.dim;
    const int q = space_dim - d;
    if (q <= 0) throw UsageError("neighborhood_volume: local sampler needs positive codimension");
    if (mesh.spherical && t >= 0.5 * kPi) throw UsageError("neighborhood_volume: t too large for the local sampler");
    auto prisms = build_prisms(mesh);
    std::vector<double> cumulative;
    double total = 0.0;
    for (const auto& pr : prisms) {
        total += pr.area;
        cumulative.push_back(total);
    }
    MeshDistance dist(mesh);
    const bool spherical = mesh.spherical;
    const double slab = ball_volume(q) * std::pow(t, q);
    // Each tube point is credited to the simplex nearest to it; points whose
    // nearest mesh point lies on a lower face are missed, an O(t) loss that
    // the extrapolation removes.
    auto acc = sample_mean(samples, seed, workers, [&](Rng& rng, std::int64_t) {
        double u = rng.uniform() * total;
        std::size_t j = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
        j = std::min(j, prisms.size() - 1);
        const Prism& pr = prisms[j];
        Vec x = pr.vertices * uniform_barycentric(d + 1, rng);
        Vec dir = rng.normal_vector(q);
        dir = pr.normal * (dir / dir.norm());
        double r = t * std::pow(rng.uniform(), 1.0 / q);
        Vec p;
        double weight = total * slab;
        if (spherical) {
            double xn = x.norm();
            p = std::cos(r) * (x / xn) + std::sin(r) * dir;
            weight *= pr.height / std::pow(xn, d + 1) * std::pow(std::cos(r), d);
            if (r > 0) weight *= std::pow(std::sin(r) / r, q - 1);
        } else {
            p = x + r * dir;
        }
        if (!inside_space(space, p)) return 0.0;
        auto [dd, owner] = dist.nearest(p, t);
        if (dd >= t || owner != static_cast<int>(j)) return 0.0;
        return weight;
    });
    double factor = lift_factor(space);
    EstimateReport r;
    r.value = factor * acc.mean();
    r.std_error = factor * acc.std_error();
    r.samples = samples;
    r.seed = seed;
    r.method = "tube_local";
    r.diagnostics = {{"t", t}, {"prism_volume", factor * total * slab}};
    return r;
}

EstimateReport uniform_tube_volume(const SpaceDescriptor& space, const std::function<double(const Vec&, double)>& dist,
                                   double t, std::int64_t samples, std::uint64_t seed, int workers) {
    double measure = 0.0;
    std::function<Vec(Rng&)> draw;
    if (space.kind == SpaceKind::ConvexBody) {
        const auto& b = *space.body;
        measure = (b.upper - b.lower).prod();
        draw = [&b](Rng& rng) {
            Vec x(b.lower.size());
            for (int i = 0; i < x.size(); ++i) x[i] = rng.uniform(b.lower[i], b.upper[i]);
            return x;
        };
    } else {
        measure = space.volume();
        SpaceDescriptor sampled = space;
        if (space.kind == SpaceKind::RealProjective) sampled = SpaceDescriptor::sphere(space.intrinsic_dim);
        draw = [sampled](Rng& rng) { return sample_uniform(sampled, rng); };
    }
    auto acc = sample_mean(samples, seed, workers, [&](Rng& rng, std::int64_t) {
        Vec p = draw(rng);
        if (!inside_space(space, p)) return 0.0;
        return dist(p, t) < t ? 1.0 : 0.0;
    });
    EstimateReport r;
    r.value = measure * acc.mean();
    r.std_error = measure * acc.std_error();
    r.samples = samples;
    r.seed = seed;
    r.method = "tube_uniform";
    r.diagnostics = {{"t", t}, {"hit_fraction", acc.mean()}};
    return r;
}

}  // namespace

EstimateReport neighborhood_volume(const SpaceDescriptor& space, const SubmanifoldMesh& mesh, double t,
                                   std::int64_t samples, std::uint64_t seed, const TubeOptions& options) {
    if (!(t > 0)) throw DomainError("neighborhood_volume: t must be positive");
    if (samples <= 0) throw UsageError("neighborhood_volume: samples must be positive");
    check_mesh_fits(space, mesh);
    if (options.sampler == TubeSampler::Local) return local_tube_volume(space, mesh, t, samples, seed, options.workers);
    MeshDistance md(mesh);
    if (space.kind == SpaceKind::Torus) {
        // Nearest periodic image: shifts in {-a, 0, a} per axis.
        const int n = space.ambient_dim;
        std::vector<Vec> shifts{Vec::Zero(n)};
        for (int i = 0; i < n; ++i) {
            std::vector<Vec> next;
            for (const auto& s : shifts)
                for (int m = -1; m <= 1; ++m) {
                    Vec v = s;
                    v[i] += m * space.lengths[i];
                    next.push_back(v);
                }
            shifts = std::move(next);
        }
        auto dist = [&](const Vec& p, double cutoff) {
            double best = cutoff;
            for (const auto& s : shifts) best = std::min(best, md.distance(p + s, best));
            return best;
        };
        return uniform_tube_volume(space, dist, t, samples, seed, options.workers);
    }
    auto dist = [&](const Vec& p, double cutoff) { return md.distance(p, cutoff); };
    return uniform_tube_volume(space, dist, t, samples, seed, options.workers);
}

EstimateReport neighborhood_volume(const SpaceDescriptor& space, const DistanceOracle& distance, double t,
                                   std::int64_t samples, std::uint64_t seed, int workers) {
    if (!(t > 0)) throw DomainError("neighborhood_volume: t must be positive");
    if (samples <= 0) throw UsageError("neighborhood_volume: samples must be positive");
    auto dist = [&](const Vec& p, double) { return distance(p); };
    return uniform_tube_volume(space, dist, t, samples, seed, workers);
}

EstimateReport lower_minkowski_content(const SpaceDescriptor& space, const SubmanifoldMesh& mesh, int k,
                                       const std::vector<double>& schedule, std::int64_t samples,
                                       std::uint64_t seed, const MinkowskiOptions& options) {
    if (schedule.size() < 3) throw UsageError("lower_minkowski_content: schedule needs at least 3 values");
    if (options.order < 1 || static_cast<int>(schedule.size()) <= options.order)
        throw UsageError("lower_minkowski_content: schedule too short for the fit order");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0)) throw UsageError("lower_minkowski_content: schedule must be positive");
        if (i > 0 && !(schedule[i] < schedule[i - 1]))
            throw UsageError("lower_minkowski_content: schedule must be strictly decreasing");
    }
    const int m = static_cast<int>(schedule.size());
    const int cols = options.order + 1;
    Vec y(m), se(m);
    Mat X(m, cols);
    std::vector<std::pair<std::string, double>> diag;
    TubeOptions tube{options.sampler, options.workers};
    for (int i = 0; i < m; ++i) {
        double t = schedule[i];
        auto nv = neighborhood_volume(space, mesh, t, samples, splitmix64(seed + static_cast<std::uint64_t>(i)), tube);
        double norm = ball_volume(k) * std::pow(t, k);
        y[i] = nv.value / norm;
        se[i] = nv.std_error / norm;
        for (int c = 0; c < cols; ++c) X(i, c) = std::pow(t, c);
        diag.emplace_back("ratio@" + std::to_string(t), y[i]);
    }
    bool weighted = (se.array() > 0).all();
    Vec w = weighted ? Vec(se.array().square().inverse()) : Vec(Vec::Ones(m));
    Mat normal = X.transpose() * w.asDiagonal() * X;
    Mat cov = normal.inverse();
    Vec beta = cov * (X.transpose() * w.asDiagonal() * y);
    Vec resid = y - X * beta;
    double rms = 0.0;
    for (int i = 0; i < m; ++i) rms += w[i] * resid[i] * resid[i];
    rms = std::sqrt(rms / m);
    EstimateReport r;
    r.value = beta[0];
    r.std_error = weighted ? std::sqrt(cov(0, 0)) : 0.0;
    r.samples = samples * m;
    r.seed = seed;
    r.method = options.sampler == TubeSampler::Local ? "minkowski_local" : "minkowski_uniform";
    r.diagnostics.emplace_back("order", options.order);
    for (int c = 1; c < cols; ++c) r.diagnostics.emplace_back("c" + std::to_string(c), beta[c]);
    r.diagnostics.emplace_back("residual", rms);
    for (auto& d : diag) r.diagnostics.push_back(std::move(d));
    return r;
}

}  // namespace waistlab
