#include "waistlab/sweepout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

#include "waistlab/errors.hpp"
#include "waistlab/integral_geometry.hpp"
#include "waistlab/rng.hpp"
#include "waistlab/spaces.hpp"

namespace waistlab {

namespace {

std::int64_t binomial(int n, int k) {
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::int64_t ipow(std::int64_t b, int e) {
    std::int64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// Calls f(cell) for every cell of the grid.
template <class F>
void for_each_cell(const Grid& g, F&& f) {
    std::vector<int> c(g.n, 0);
    while (true) {
        f(c);
        int j = 0;
        while (j < g.n && ++c[j] == g.cells) c[j++] = 0;
        if (j == g.n) break;
    }
}

Vec cell_centre(const Grid& g, const std::vector<int>& c) {
    Vec z(g.n);
    for (int i = 0; i < g.n; ++i) z[i] = (c[i] + 0.5) * g.side();
    return z;
}

}  // namespace

std::int64_t Grid::p() const { return ipow(cells, n); }

std::int64_t Grid::face_count(int d) const {
    if (d < 0 || d > n) return 0;
    return binomial(n, d) * ipow(cells, d) * ipow(cells + 1, n - d);
}

TileCoords tile_decompose(const Grid& g, int k, const Vec& q) {
    const int n = g.n;
    if (k < 1 || k > n - 1) throw DomainError("tile_decompose: need 1 <= k <= n-1");
    if (q.size() != n) throw UsageError("tile_decompose: point dimension mismatch");
    if ((q.array() < -kExactTol).any() || (q.array() > 1.0 + kExactTol).any())
        throw DomainError("tile_decompose: point outside the cube");
    const double l = g.side();
    TileCoords tc;
    tc.cell.resize(n);
    Vec w(n);
    for (int i = 0; i < n; ++i) {
        int c = static_cast<int>(std::floor(q[i] * g.cells));
        c = std::clamp(c, 0, g.cells - 1);
        tc.cell[i] = c;
        w[i] = q[i] * g.cells - c - 0.5;
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(w[a]) > std::abs(w[b]); });
    tc.fixed.assign(order.begin(), order.begin() + k);
    tc.pivot = order[k - 1];
    tc.t = 1.0 - 2.0 * std::abs(w[tc.pivot]);
    std::vector<bool> in_f(n, false);
    for (int i : tc.fixed) {
        in_f[i] = true;
        tc.signs.push_back(w[i] < 0 ? -1 : 1);
    }
    Vec x(n), y(n);
    for (int i = 0; i < n; ++i) {
        if (!in_f[i]) {
            x[i] = tc.t < 1.0 ? w[i] / (1.0 - tc.t) : 0.0;
            y[i] = 0.0;
        }
    }
    for (int a = 0; a < k; ++a) {
        int i = tc.fixed[a];
        double s = tc.signs[a];
        x[i] = 0.5 * s;
        if (i == tc.pivot) {
            y[i] = 0.0;
        } else {
            y[i] = tc.t > 0.0 ? (w[i] - (1.0 - tc.t) * 0.5 * s) / tc.t : 0.5 * s;
        }
    }
    tc.x = Vec(n);
    tc.y = Vec(n);
    for (int i = 0; i < n; ++i) {
        tc.x[i] = (tc.cell[i] + 0.5 + x[i]) * l;
        tc.y[i] = (tc.cell[i] + 0.5 + y[i]) * l;
    }
    return tc;
}

Vec psi_epsilon(const Grid& g, int k, double eps, const Vec& q) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("psi_epsilon: eps must lie in (0, 1)");
    TileCoords tc = tile_decompose(g, k, q);
    if (tc.t <= 1.0 - eps) return tc.x;
    double s = (tc.t - (1.0 - eps)) / eps;
    return (1.0 - s) * tc.x + s * tc.y;
}

double flat_box_section(const Vec& point, const Mat& dirs, const Vec& lo, const Vec& hi) {
    const int n = static_cast<int>(point.size());
    if (dirs.cols() == 1) {
        Vec d = dirs.col(0);
        double s0 = -std::numeric_limits<double>::infinity(), s1 = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (std::abs(d[i]) < 1e-300) {
                if (point[i] < lo[i] || point[i] > hi[i]) return 0.0;
                continue;
            }
            double a = (lo[i] - point[i]) / d[i], b = (hi[i] - point[i]) / d[i];
            s0 = std::max(s0, std::min(a, b));
            s1 = std::min(s1, std::max(a, b));
        }
        return std::max(0.0, s1 - s0) * d.norm();
    }
    if (dirs.cols() != 2 || n != 3) throw UsageError("flat_box_section: supports lines, and planes in R^3");
    Eigen::Vector3d d1 = dirs.col(0), d2 = dirs.col(1);
    Eigen::Vector3d nrm = d1.cross(d2);
    Eigen::Vector3d p0 = point;
    std::vector<Eigen::Vector3d> pts;
    for (int axis = 0; axis < 3; ++axis) {
        int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
        for (int c1 = 0; c1 < 2; ++c1)
            for (int c2 = 0; c2 < 2; ++c2) {
                Eigen::Vector3d base;
                base[axis] = lo[axis];
                base[a1] = c1 ? hi[a1] : lo[a1];
                base[a2] = c2 ? hi[a2] : lo[a2];
                double denom = nrm[axis];
                double fb = nrm.dot(base - p0);
                if (std::abs(denom) < 1e-300) continue;
                double s = -fb / denom;
                if (s < 0 || s > hi[axis] - lo[axis]) continue;
                Eigen::Vector3d x = base;
                x[axis] += s;
                bool dup = false;
                for (const auto& y : pts) dup = dup || (x - y).norm() < 1e-14;
                if (!dup) pts.push_back(x);
            }
    }
    if (pts.size() < 3) return 0.0;
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (const auto& x : pts) c += x;
    c /= static_cast<double>(pts.size());
    Eigen::Vector3d e1 = d1.normalized();
    Eigen::Vector3d e2 = (d2 - d2.dot(e1) * e1).normalized();
    std::vector<std::pair<double, Eigen::Vector2d>> poly;
    for (const auto& x : pts) {
        Eigen::Vector2d uv((x - c).dot(e1), (x - c).dot(e2));
        poly.push_back({std::atan2(uv[1], uv[0]), uv});
    }
    std::sort(poly.begin(), poly.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    double area = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i].second;
        const auto& b = poly[(i + 1) % poly.size()].second;
        area += a[0] * b[1] - a[1] * b[0];
    }
    return 0.5 * std::abs(area);
}

double choose_epsilon(const Grid& g, int k, const Mat& normal) {
    if (k >= 2) return 0.125;
    Vec u = normal.col(0);
    const int n = g.n;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> m(n, -(g.cells - 1));
    if (g.cells == 1) return 0.5;
    while (true) {
        bool zero = std::all_of(m.begin(), m.end(), [](int v) { return v == 0; });
        if (!zero) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += u[i] * m[i];
            best = std::min(best, std::abs(s));
        }
        int j = 0;
        while (j < n && ++m[j] == g.cells) m[j++] = -(g.cells - 1);
        if (j == n) break;
    }
    return std::min(0.5, 0.5 * best / u.cwiseAbs().sum());
}

DeformResult deform_family(const FlatFamily& fam, const Grid& g, double eps, int resolution) {
    const int n = g.n;
    const int k = static_cast<int>(fam.normal.cols());
    const int m = n - k;
    if (k < 1 || k >= n || fam.normal.rows() != n) throw UsageError("deform_family: bad flat directions");
    if (resolution < 1) throw UsageError("deform_family: resolution must be positive");
    if (k >= 2 && m != 1) throw UsageError("deform_family: unsupported regime (k >= 2 needs line flats)");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("deform_family: eps must lie in (0, 1)");
    const double l = g.side();
    Mat B = orthogonal_complement(fam.normal);
    DeformResult res;
    res.eps = eps;
    std::set<std::vector<int>> faces;
    const Vec mid = Vec::Constant(n, 0.5);
    const double R = 0.5 * std::sqrt(static_cast<double>(n));
    double h = l / resolution;
    if (k >= 2) h = std::min(h, eps * l / 4.0);
    const int steps = static_cast<int>(std::ceil(2.0 * R / h));

    for (std::size_t f = 0; f < fam.offsets.size(); ++f) {
        Vec o = fam.normal * fam.offsets[f];
        Vec base = o + B * (B.transpose() * (mid - o));
        // General position against the dual (k-1)-skeleton.
        if (k == 1) {
            Vec u = fam.normal.col(0);
            for_each_cell(g, [&](const std::vector<int>& c) {
                if (std::abs(u.dot(cell_centre(g, c)) - fam.offsets[f][0]) < kGeomTol)
                    throw UsageError("deform_family: flat " + std::to_string(f) + " meets a dual vertex");
            });
        } else {
            Eigen::Vector3d d = B.col(0);
            for_each_cell(g, [&](const std::vector<int>& c) {
                Eigen::Vector3d z = cell_centre(g, c);
                for (int a = 0; a < 3; ++a) {
                    Eigen::Vector3d e = Eigen::Vector3d::Unit(a);
                    Eigen::Vector3d cr = d.cross(e);
                    if (cr.norm() < 1e-12) continue;
                    if (std::abs((z - Eigen::Vector3d(base)).dot(cr)) / cr.norm() < kGeomTol)
                        throw UsageError("deform_family: flat " + std::to_string(f) + " meets a dual edge");
                }
            });
        }

        // z1: faces of the primal skeleton hit by collapsed points.
        std::vector<int> idx(m, 0);
        bool in_run = false;
        int runs = 0;
        Vec prev_image;
        while (true) {
            Vec q = base;
            for (int j = 0; j < m; ++j) q += (-R + idx[j] * h) * B.col(j);
            bool inside = (q.array() >= 0.0).all() && (q.array() <= 1.0).all();
            bool collar = false;
            if (inside) {
                TileCoords tc = tile_decompose(g, k, q);
                if (tc.t <= 1.0 - eps) {
                    std::vector<int> key(2 * n);
                    for (int a = 0; a < n; ++a) {
                        key[2 * a] = 0;
                        key[2 * a + 1] = tc.cell[a];
                    }
                    for (int a = 0; a < k; ++a) {
                        int i = tc.fixed[a];
                        key[2 * i] = 1;
                        key[2 * i + 1] = tc.cell[i] + (tc.signs[a] > 0 ? 1 : 0);
                    }
                    faces.insert(std::move(key));
                } else {
                    collar = true;
                    if (k >= 2) {
                        double s = (tc.t - (1.0 - eps)) / eps;
                        Vec img = (1.0 - s) * tc.x + s * tc.y;
                        if (in_run) res.z2 += (img - prev_image).norm();
                        prev_image = img;
                    }
                }
            }
            if (k >= 2) {
                if (collar && !in_run) ++runs;
                in_run = collar;
            }
            int j = 0;
            while (j < m && ++idx[j] > steps) idx[j++] = 0;
            if (j == m) break;
        }

        if (k == 1) {
            // Collars are cubes of side eps*l at cell centres; psi is the
            // homothety of ratio 1/eps on each.
            Vec u = fam.normal.col(0);
            double reach = 0.5 * eps * l * u.cwiseAbs().sum();
            int met = 0;
            for_each_cell(g, [&](const std::vector<int>& c) {
                Vec z = cell_centre(g, c);
                if (std::abs(u.dot(z) - fam.offsets[f][0]) > reach) return;
                Vec half = Vec::Constant(n, 0.5 * eps * l);
                double piece = flat_box_section(o, B, z - half, z + half);
                if (piece > 0) {
                    ++met;
                    res.z2 += piece / std::pow(eps, m);
                }
            });
            runs = met;
        }
        res.max_components = std::max(res.max_components, runs);
    }
    res.faces_hit = static_cast<std::int64_t>(faces.size());
    res.z1 = static_cast<double>(faces.size()) * std::pow(l, m);
    res.total = res.z1 + res.z2;
    return res;
}

CupReport cup_bound_check(int n, int k, int cells, int trials, std::uint64_t seed, int resolution) {
    bool supported = (n == 2 && k == 1) || (n == 3 && (k == 1 || k == 2));
    if (!supported) throw UsageError("cup_bound_check: unsupported regime (n,k); implemented: (2,1), (3,1), (3,2)");
    if (cells < 1 || cells > 8) throw UsageError("cup_bound_check: cells must lie in [1, 8]");
    if (trials < 1) throw UsageError("cup_bound_check: trials must be positive");
    Grid g{n, cells};
    const double l = g.side();
    CupReport rep;
    rep.n = n;
    rep.k = k;
    rep.cells = cells;
    rep.p = g.p();
    const double p = static_cast<double>(rep.p);
    rep.upper_bound = std::pow(2.0, n + k) * binomial(n, k) * std::pow(p, static_cast<double>(k) / n);
    rep.lower_reference = std::pow(p, static_cast<double>(k) / n);
    rep.min_total = std::numeric_limits<double>::infinity();
    rep.min_partition_section = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(trial));
        FlatFamily fam;
        fam.normal = random_frame(n, k, rng);
        double eps = choose_epsilon(g, k, fam.normal);
        Vec u = fam.normal.col(0);
        for (std::int64_t i = 0; i < rep.p; ++i) {
            Vec point(n);
            if (i % 2 == 0) {
                for (int a = 0; a < n; ++a) point[a] = rng.uniform();
            } else {
                // Aim at a random collar.
                std::vector<int> c(n);
                for (int a = 0; a < n; ++a) c[a] = static_cast<int>(rng.below(static_cast<std::size_t>(cells)));
                point = cell_centre(g, c);
                if (k == 1) {
                    double reach = 0.5 * eps * l * u.cwiseAbs().sum();
                    point += u * (0.9 * reach * rng.uniform(-1.0, 1.0));
                } else {
                    int axis = static_cast<int>(rng.below(static_cast<std::size_t>(n)));
                    for (int a = 0; a < n; ++a)
                        point[a] += a == axis ? rng.uniform(-0.5, 0.5) * l : rng.uniform(-0.25, 0.25) * eps * l;
                }
            }
            fam.offsets.push_back(fam.normal.transpose() * point);
        }
        DeformResult d = deform_family(fam, g, eps, resolution);
        while (k >= 2 && d.max_components > k && eps > 1.0 / 256) {
            eps *= 0.5;
            d = deform_family(fam, g, eps, resolution);
        }
        rep.rows.push_back({trial, u, eps, d.z1, d.z2, d.total});
        rep.max_total = std::max(rep.max_total, d.total);
        rep.min_total = std::min(rep.min_total, d.total);
        rep.max_z1 = std::max(rep.max_z1, d.z1);
        rep.max_z2 = std::max(rep.max_z2, d.z2);
        rep.max_components = std::max(rep.max_components, d.max_components);
        // Partition logic: each subcube's own central flat section.
        Mat B = orthogonal_complement(fam.normal);
        for_each_cell(g, [&](const std::vector<int>& c) {
            Vec z = cell_centre(g, c);
            Vec lo = z.array() - 0.5 * l, hi = z.array() + 0.5 * l;
            double s = flat_box_section(z, B, lo, hi) / std::pow(l, n - k);
            rep.min_partition_section = std::min(rep.min_partition_section, s);
        });
    }
    rep.pass = rep.max_total <= rep.upper_bound && rep.min_total >= 0.95 * rep.lower_reference &&
               rep.min_partition_section >= 0.95 && rep.max_components <= k;
    if (n == 2) {
        double sp = std::sqrt(p);
        rep.pass = rep.pass && rep.max_total <= 4 * sp + 2 && rep.max_z1 <= 2 * sp + 2 && rep.max_z2 <= 2 * sp;
    }
    return rep;
}

void write_trial_csv(std::ostream& out, const CupReport& rep) {
    out << "n,k,cells,p,trial,direction,eps,z1,z2,total\n";
    out.precision(12);
    for (const auto& r : rep.rows) {
        out << rep.n << ',' << rep.k << ',' << rep.cells << ',' << rep.p << ',' << r.trial << ',';
        for (int i = 0; i < r.direction.size(); ++i) out << (i ? " " : "") << r.direction[i];
        out << ',' << r.eps << ',' << r.z1 << ',' << r.z2 << ',' << r.total << '\n';
    }
}

double Polynomial2::operator()(double x, double y) const {
    double X = 2.0 * x - 1.0, Y = 2.0 * y - 1.0;
    double v = 0.0;
    std::size_t idx = 0;
    for (int e = 0; e <= degree; ++e)
        for (int j = 0; j <= e; ++j) v += coeffs[idx++] * std::pow(X, e - j) * std::pow(Y, j);
    return v;
}

namespace {

int monomial_count(int d) { return (d + 1) * (d + 2) / 2; }

bool degenerate(const Polynomial2& p) {
    double m = 0.0;
    for (int i = 0; i <= 10; ++i)
        for (int j = 0; j <= 10; ++j) m = std::max(m, std::abs(p(i / 10.0, j / 10.0)));
    return m < 1e-8;
}

}  // namespace

Polynomial2 random_polynomial(int degree, Rng& rng) {
    if (degree < 1) throw DomainError("random_polynomial: degree must be positive");
    for (int attempt = 0; attempt < 16; ++attempt) {
        Polynomial2 p;
        p.degree = degree;
        for (int i = 0; i < monomial_count(degree); ++i) p.coeffs.push_back(rng.normal());
        if (!degenerate(p)) return p;
    }
    throw SamplingFailure("random_polynomial: retry cap exceeded", 0.0);
}

Polynomial2 interpolating_polynomial(const std::vector<Vec>& points, Rng& rng) {
    const int p = static_cast<int>(points.size());
    int d = 1;
    while (monomial_count(d) <= p) ++d;
    const int m = monomial_count(d);
    Mat A(std::max(p, 1), m);
    A.setZero();
    for (int r = 0; r < p; ++r) {
        double X = 2.0 * points[r][0] - 1.0, Y = 2.0 * points[r][1] - 1.0;
        int idx = 0;
        for (int e = 0; e <= d; ++e)
            for (int j = 0; j <= e; ++j) A(r, idx++) = std::pow(X, e - j) * std::pow(Y, j);
    }
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-10 * svd.singularValues()[0]) ++rank;
    Mat kernel = svd.matrixV().rightCols(m - rank);
    Vec c = kernel * rng.normal_vector(static_cast<int>(kernel.cols()));
    Polynomial2 poly;
    poly.degree = d;
    poly.coeffs.assign(c.data(), c.data() + c.size());
    return poly;
}

int count_line_roots(const Polynomial2& poly, const Vec& origin, const Vec& dir) {
    // Chord of the line inside the unit square.
    double s0 = -std::numeric_limits<double>::infinity(), s1 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i) {
        if (std::abs(dir[i]) < 1e-300) {
            if (origin[i] < 0.0 || origin[i] > 1.0) return 0;
            continue;
        }
        double a = -origin[i] / dir[i], b = (1.0 - origin[i]) / dir[i];
        s0 = std::max(s0, std::min(a, b));
        s1 = std::min(s1, std::max(a, b));
    }
    if (!(s1 > s0)) return 0;
    const int d = poly.degree;
    // Monomial coefficients in tau in [-1, 1] from Chebyshev-node values.
    Mat V(d + 1, d + 1);
    Vec f(d + 1);
    for (int i = 0; i <= d; ++i) {
        double tau = std::cos(M_PI * (i + 0.5) / (d + 1));
        double s = 0.5 * (s0 + s1) + 0.5 * (s1 - s0) * tau;
        f[i] = poly(origin[0] + s * dir[0], origin[1] + s * dir[1]);
        for (int j = 0; j <= d; ++j) V(i, j) = std::pow(tau, j);
    }
    Vec c = V.colPivHouseholderQr().solve(f);
    double scale = c.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0;
    int deg = d;
    while (deg > 0 && std::abs(c[deg]) < 1e-12 * scale) --deg;
    if (deg == 0) return 0;
    Mat comp = Mat::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
    Eigen::EigenSolver<Mat> es(comp, false);
    int count = 0;
    for (int i = 0; i < deg; ++i) {
        auto z = es.eigenvalues()[i];
        if (std::abs(z.imag()) < 1e-9 * std::max(1.0, std::abs(z.real())) && z.real() >= -1.0 && z.real() <= 1.0) ++count;
    }
    return count;
}

EstimateReport algebraic_family_volume(const Polynomial2& poly, std::int64_t lines, std::uint64_t seed,
                                       int workers) {
    auto counter = [&](const Vec& origin, const Mat& dirs) { return count_line_roots(poly, origin, dirs.col(0)); };
    auto r = cauchy_crofton(2, 1, Vec::Zero(2), Vec::Ones(2), counter, lines, seed, workers);
    r.method = "crofton_algebraic";
    r.diagnostics.emplace_back("degree", poly.degree);
    r.diagnostics.emplace_back("bound", 2.0 * poly.degree);
    return r;
}

}  // namespace waistlab
