#include "waistlab/integral_geometry.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "waistlab/errors.hpp"
#include "waistlab/parallel.hpp"
#include "waistlab/spaces.hpp"

namespace waistlab {

namespace {

constexpr double kFaceTol = 1e-10;
constexpr double kPerturbation = 1e-9;
constexpr int kMaxPerturbations = 8;

// Signed cofactors spanning the kernel of a d x (d+1) matrix.
Vec kernel_cofactors(const Mat& w) {
    const int d = static_cast<int>(w.rows());
    Vec lambda(d + 1);
    if (d == 0) {
        lambda[0] = 1.0;
        return lambda;
    }
    for (int i = 0; i <= d; ++i) {
        Mat minor(d, d);
        for (int c = 0, j = 0; c <= d; ++c)
            if (c != i) minor.col(j++) = w.col(c);
        lambda[i] = ((i % 2) ? -1.0 : 1.0) * minor.determinant();
    }
    return lambda;
}

// Small rotation exp(A) with A skew and |A| ~ kPerturbation.
Mat small_rotation(int n, Rng& rng) {
    Mat a = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double x = kPerturbation * rng.normal();
            a(i, j) = x;
            a(j, i) = -x;
        }
    // Second-order exponential, then re-orthonormalized.
    Mat r = Mat::Identity(n, n) + a + 0.5 * a * a;
    return orthonormalize(r);
}

}  // namespace

EquatorialSubsphere sample_equator(int n, int k, Rng& rng) {
    if (k < 0 || k >= n) throw DomainError("sample_equator: need 0 <= k < n");
    return {random_frame(n + 1, k + 1, rng)};
}

IntersectionCount count_intersections(const SubmanifoldMesh& mesh, const EquatorialSubsphere& e) {
    IntersectionCount out;
    if (mesh.simplices.empty()) return out;
    const int n = mesh.ambient - 1;
    const int k = static_cast<int>(e.frame.cols()) - 1;
    if (e.frame.rows() != mesh.ambient) throw UsageError("count_intersections: dimension mismatch");
    if (mesh.dim != n - k) throw UsageError("count_intersections: mesh dimension must equal n - k");
    Mat complement = orthogonal_complement(e.frame);  // (n+1) x d
    for (std::size_t s = 0; s < mesh.simplices.size(); ++s) {
        Mat w = complement.transpose() * mesh.simplex_matrix(s);
        Vec lambda = kernel_cofactors(w);
        double scale = lambda.cwiseAbs().maxCoeff();
        if (scale == 0.0) {
            out.degenerate = true;
            continue;
        }
        bool pos = (lambda.array() > 0).all();
        bool neg = (lambda.array() < 0).all();
        if (pos || neg) {
            ++out.count;
            if (lambda.cwiseAbs().minCoeff() < kFaceTol * scale) out.degenerate = true;
        } else if (lambda.cwiseAbs().minCoeff() < kFaceTol * scale) {
            out.degenerate = true;
        }
    }
    return out;
}

EstimateReport crofton_volume(const SubmanifoldMesh& mesh, int k, std::int64_t samples, std::uint64_t seed,
                              int workers) {
    if (samples <= 0) throw UsageError("crofton_volume: samples must be positive");
    if (!mesh.spherical) throw UsageError("crofton_volume: mesh must lie on a sphere");
    const int n = mesh.ambient - 1;
    if (mesh.dim != n - k) throw UsageError("crofton_volume: mesh dimension must equal n - k");
    std::vector<int> perturbed_flags(static_cast<std::size_t>(samples), 0);
    auto acc = sample_mean(samples, seed, workers, [&](Rng& rng, std::int64_t i) {
        EquatorialSubsphere e = sample_equator(n, k, rng);
        IntersectionCount c = count_intersections(mesh, e);
        if (c.degenerate) {
            // Deterministic tie-break: rotate by a tiny rotation seeded by the sample index.
            Rng tweak = Rng::stream(seed ^ 0xA5A5A5A5ULL, static_cast<std::uint64_t>(i));
            for (int attempt = 0; attempt < kMaxPerturbations && c.degenerate; ++attempt)
                c = count_intersections(mesh, {small_rotation(n + 1, tweak) * e.frame});
            perturbed_flags[static_cast<std::size_t>(i)] = 1;
        }
        return static_cast<double>(c.count);
    });
    int perturbed = 0;
    for (int f : perturbed_flags) perturbed += f;
    double scale = 0.5 * sphere_volume(n - k);
    double max_edge = 0.0;
    for (std::size_t s = 0; s < mesh.simplices.size(); ++s) {
        Mat m = mesh.simplex_matrix(s);
        for (int a = 0; a < m.cols(); ++a)
            for (int b = a + 1; b < m.cols(); ++b) max_edge = std::max(max_edge, (m.col(a) - m.col(b)).norm());
    }
    EstimateReport r;
    r.value = scale * acc.mean();
    r.std_error = scale * acc.std_error();
    r.samples = samples;
    r.seed = seed;
    r.method = "crofton_equators";
    r.diagnostics = {{"perturbed_samples", perturbed},
                     {"mesh_volume", mesh.volume()},
                     {"max_edge", max_edge}};
    return r;
}

double euclidean_crofton_calibration(int n, int k) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, double> cache;
    if (k < 1 || k >= n + 1 || n - k < 0) throw DomainError("calibration: need 1 <= k <= n");
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, k);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const int d = n - k;
    double value = 1.0;
    if (d > 0) {
        // Unit reference flat spanned by e_1..e_d; fixed internal stream.
        constexpr std::int64_t kCalibrationSamples = 1 << 18;
        auto acc = sample_mean(kCalibrationSamples, 0xC0FFEEULL + 131u * n + k, 1, [&](Rng& rng, std::int64_t) {
            Mat q = random_frame(n, n, rng);
            Mat b = q.rightCols(d);
            return std::abs(b.topRows(d).determinant());
        });
        value = acc.mean();
    }
    cache.emplace(key, value);
    return value;
}

bool flat_meets_simplex(const Vec& origin, const Mat& directions, const Mat& simplex) {
    const int n = static_cast<int>(simplex.rows());
    const int d = static_cast<int>(simplex.cols()) - 1;
    Mat b = orthogonal_complement(directions);  // n x d
    if (b.cols() != d) throw UsageError("flat_meets_simplex: dimension mismatch");
    Mat m(d + 1, d + 1);
    Vec rhs(d + 1);
    for (int i = 0; i <= d; ++i) m.block(0, i, d, 1) = b.transpose() * (simplex.col(i) - origin);
    m.row(d).setOnes();
    rhs.setZero();
    rhs[d] = 1.0;
    Eigen::FullPivLU<Mat> lu(m);
    if (!lu.isInvertible()) return false;
    Vec lambda = lu.solve(rhs);
    (void)n;
    return (lambda.array() >= 0).all();
}

EstimateReport cauchy_crofton(int n, int k, const Vec& lower, const Vec& upper, const FlatCounter& counter,
                              std::int64_t samples, std::uint64_t seed, int workers) {
    if (samples <= 0) throw UsageError("cauchy_crofton: samples must be positive");
    const int d = n - k;
    Vec center = 0.5 * (lower + upper);
    double radius = 0.5 * (upper - lower).norm();
    double calib = euclidean_crofton_calibration(n, k);
    auto acc = sample_mean(samples, seed, workers, [&](Rng& rng, std::int64_t) {
        Mat q = random_frame(n, n, rng);
        Mat dirs = q.leftCols(k);
        Mat normal = q.rightCols(d);
        Vec o;
        do {
            o = Vec(d);
            for (int i = 0; i < d; ++i) o[i] = rng.uniform(-radius, radius);
        } while (o.norm() > radius);
        return static_cast<double>(counter(center + normal * o, dirs));
    });
    double measure = ball_volume(d) * std::pow(radius, d);
    EstimateReport r;
    r.value = measure * acc.mean() / calib;
    r.std_error = measure * acc.std_error() / calib;
    r.samples = samples;
    r.seed = seed;
    r.method = "cauchy_crofton_flats";
    r.diagnostics = {{"calibration", calib}, {"flat_measure", measure}};
    return r;
}

EstimateReport cauchy_crofton_euclidean(const SubmanifoldMesh& mesh, int k, const Vec& lower, const Vec& upper,
                                        std::int64_t samples, std::uint64_t seed, int workers) {
    if (mesh.spherical) throw UsageError("cauchy_crofton_euclidean: mesh must be euclidean");
    const int n = mesh.ambient;
    if (mesh.dim != n - k) throw UsageError("cauchy_crofton_euclidean: mesh dimension must equal n - k");
    for (const auto& v : mesh.vertices)
        if ((v.array() < lower.array() - kExactTol).any() || (v.array() > upper.array() + kExactTol).any())
            throw UsageError("cauchy_crofton_euclidean: region does not contain the mesh");
    std::vector<Mat> simplices;
    for (std::size_t s = 0; s < mesh.simplices.size(); ++s) simplices.push_back(mesh.simplex_matrix(s));
    auto counter = [&](const Vec& origin, const Mat& dirs) {
        int c = 0;
        for (const auto& s : simplices) c += flat_meets_simplex(origin, dirs, s) ? 1 : 0;
        return c;
    };
    auto r = cauchy_crofton(n, k, lower, upper, counter, samples, seed, workers);
    r.diagnostics.emplace_back("mesh_volume", mesh.volume());
    return r;
}

}  // namespace waistlab
