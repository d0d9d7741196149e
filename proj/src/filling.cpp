#include "waistlab/filling.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "waistlab/errors.hpp"

namespace waistlab {

namespace {

bool has_repeat(const QSimplex& s) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] == s[i - 1]) return true;
    return false;
}

mpq_class ratio(long a, long b) {
    mpq_class q(a, b);
    q.canonicalize();
    return q;
}

mpq_class qpow(const mpq_class& x, int e) {
    mpq_class r = 1;
    for (int i = 0; i < std::abs(e); ++i) r *= x;
    if (e < 0) r = 1 / r;
    return r;
}

bool in_facet(const QSimplex& s) {
    const std::size_t n = s.front().size();
    for (std::size_t b = 0; b < n; ++b) {
        bool zero = true, one = true;
        for (const auto& v : s) {
            zero = zero && v[b] == 0;
            one = one && v[b] == 1;
        }
        if (zero || one) return true;
    }
    return false;
}

bool strictly_inside(const QCube& c, const QSimplex& s) {
    for (const auto& v : s)
        for (std::size_t b = 0; b < v.size(); ++b)
            if (!(v[b] > c.corner[b] && v[b] < c.corner[b] + c.edge)) return false;
    return true;
}

QPoint crossing(const QPoint& u, const QPoint& w, int axis, const mpq_class& t) {
    mpq_class s = (t - u[axis]) / (w[axis] - u[axis]);
    QPoint p(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) p[i] = u[i] + s * (w[i] - u[i]);
    p[axis] = t;
    return p;
}

// Triangulated piece of s on one side of x_axis = t (lower: x <= t).
std::vector<QSimplex> side_piece(const QSimplex& s, int axis, const mpq_class& t, bool lower) {
    auto on_side = [&](const QPoint& v) { return lower ? v[axis] <= t : v[axis] >= t; };
    const std::size_t d = s.size() - 1;
    if (d == 0) return {s};
    if (d == 1) {
        QSimplex seg;
        for (const auto& v : s)
            if (on_side(v)) seg.push_back(v);
        if (seg.size() == 1) seg.push_back(crossing(s[0], s[1], axis, t));
        return {make_simplex(seg)};
    }
    if (d != 2) throw UsageError("cut_chain: chains of dimension above 2 are not cut");
    std::vector<QPoint> verts;
    std::vector<std::pair<QPoint, QPoint>> edges;
    auto add_vertex = [&](const QPoint& p) {
        if (std::find(verts.begin(), verts.end(), p) == verts.end()) verts.push_back(p);
    };
    for (const auto& v : s)
        if (on_side(v)) add_vertex(v);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) {
            const QPoint &u = s[i], &w = s[j];
            std::vector<QPoint> part;
            if (on_side(u)) part.push_back(u);
            if (on_side(w)) part.push_back(w);
            bool crosses = (u[axis] - t) * (w[axis] - t) < 0;
            if (crosses) {
                QPoint c = crossing(u, w, axis, t);
                add_vertex(c);
                part.push_back(c);
            }
            if (part.size() == 2 && part[0] != part[1]) edges.push_back({part[0], part[1]});
        }
    std::vector<QPoint> plane;
    for (const auto& v : verts)
        if (v[axis] == t) plane.push_back(v);
    if (plane.size() == 2) {
        bool present = false;
        for (const auto& e : edges)
            present = present || (e.first == plane[0] && e.second == plane[1]) ||
                      (e.first == plane[1] && e.second == plane[0]);
        if (!present) edges.push_back({plane[0], plane[1]});
    }
    QPoint apex = *std::min_element(verts.begin(), verts.end());
    std::vector<QSimplex> out;
    for (const auto& e : edges) {
        if (e.first == apex || e.second == apex) continue;
        out.push_back(make_simplex({apex, e.first, e.second}));
    }
    return out;
}

struct Sides {
    bool lower = false, upper = false;
};

Sides sides_of(const QSimplex& s, int axis, const mpq_class& t) {
    bool below = false, above = false, all_on = true;
    for (const auto& v : s) {
        below = below || v[axis] < t;
        above = above || v[axis] > t;
        all_on = all_on && v[axis] == t;
    }
    return {below || all_on, above};
}

Mod2Chain subdivide(const QSimplex& s, int ambient, int axis, const mpq_class& t) {
    Mod2Chain out{static_cast<int>(s.size()) - 1, ambient, {}};
    Sides sd = sides_of(s, axis, t);
    if (sd.lower)
        for (auto& p : side_piece(s, axis, t, true)) out.toggle(p);
    if (sd.upper)
        for (auto& p : side_piece(s, axis, t, false)) out.toggle(p);
    return out;
}

Mod2Chain cone(const QPoint& apex, const Mod2Chain& c) {
    Mod2Chain out{c.dim + 1, c.ambient, {}};
    for (const auto& s : c.simplices) {
        if (std::find(s.begin(), s.end(), apex) != s.end()) continue;
        QSimplex t = s;
        t.push_back(apex);
        out.toggle(std::move(t));
    }
    return out;
}

Mod2Chain full_boundary(const Mod2Chain& z) {
    Mod2Chain out{z.dim - 1, z.ambient, {}};
    if (z.dim <= 0) return out;
    for (const auto& s : z.simplices)
        for (std::size_t i = 0; i < s.size(); ++i) {
            QSimplex f;
            for (std::size_t j = 0; j < s.size(); ++j)
                if (j != i) f.push_back(s[j]);
            out.toggle(std::move(f));
        }
    return out;
}

Mod2Chain homotopy_of(const QSimplex& s, int ambient, int axis, const mpq_class& t,
                      std::map<QSimplex, Mod2Chain>& memo) {
    auto it = memo.find(s);
    if (it != memo.end()) return it->second;
    const int d = static_cast<int>(s.size()) - 1;
    Mod2Chain result{d + 1, ambient, {}};
    if (d >= 1) {
        Mod2Chain c = subdivide(s, ambient, axis, t);
        c.toggle(s);
        for (std::size_t i = 0; i < s.size(); ++i) {
            QSimplex f;
            for (std::size_t j = 0; j < s.size(); ++j)
                if (j != i) f.push_back(s[j]);
            c.add(homotopy_of(f, ambient, axis, t, memo));
        }
        result = cone(s.front(), c);
    }
    memo.emplace(s, result);
    return result;
}

void check_ambient(const Mod2Chain& z, const CoverLedger& cover) {
    for (const auto& c : cover.cubes) {
        if (static_cast<int>(c.corner.size()) != z.ambient) throw UsageError("fill: cube and chain dimensions differ");
        if (!(c.edge > 0 && c.edge <= 1)) throw UsageError("fill: cube edges must lie in (0, 1]");
    }
}

// Overlapping open cubes of edge d covering [alpha, beta] along axis.
void add_column(std::vector<QCube>& out, const QCube& c, int axis, const mpq_class& alpha, const mpq_class& beta) {
    mpq_class len = beta - alpha;
    if (len < 0) return;
    mpq_class ratio = len / c.edge;
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
    const long m = fl.get_si() + 1;
    mpq_class gap = (m * c.edge - len) / (m + 1);
    for (long i = 0; i < m; ++i) {
        QCube q = c;
        q.corner[axis] = alpha - gap + i * (c.edge - gap);
        out.push_back(std::move(q));
    }
}

CoverLedger straddling(const CoverLedger& cover, int axis, const mpq_class& t) {
    CoverLedger out{cover.k - 1, {}};
    for (const auto& c : cover.cubes)
        if (c.corner[axis] < t && c.corner[axis] + c.edge > t) out.cubes.push_back(c);
    return out;
}

CoverLedger fill_ledger(const CoverLedger& cover, int axis) {
    CoverLedger out{cover.k + 1, {}};
    if (cover.cubes.empty()) return out;
    mpq_class t = choose_cut(cover, axis);
    for (const auto& c : cover.cubes) {
        mpq_class lo = c.corner[axis], hi = lo + c.edge;
        if (lo < t && hi > t) {
            add_column(out.cubes, c, axis, 0, 1);
        } else if (lo < t) {
            if (hi > 0) add_column(out.cubes, c, axis, 0, std::min(hi, mpq_class(1)));
        } else if (lo < 1) {
            add_column(out.cubes, c, axis, std::max(lo, mpq_class(0)), 1);
        }
    }
    if (cover.k >= 1) {
        CoverLedger sub = fill_ledger(straddling(cover, axis, t), axis + 1);
        for (const auto& c : sub.cubes) add_column(out.cubes, c, axis, 0, 1);
    }
    return out;
}

Mod2Chain fill_chain(const Mod2Chain& z, const CoverLedger& cover, int axis) {
    Mod2Chain h{z.dim + 1, z.ambient, {}};
    if (z.empty()) return h;
    mpq_class t = choose_cut(cover, axis);
    CutResult cut = cut_chain(z, axis, t);
    h.add(subdivision_homotopy(z, axis, t));
    h.add(cone_to_facet(cut.lower, axis, 0));
    h.add(cone_to_facet(cut.upper, axis, 1));
    if (z.dim >= 1 && !cut.slice.empty()) {
        Mod2Chain hs = fill_chain(cut.slice, straddling(cover, axis, t), axis + 1);
        h.add(cone_to_facet(hs, axis, 0));
        h.add(cone_to_facet(hs, axis, 1));
    }
    return h;
}

mpq_class odd_dyadic(Rng& rng, double lo, double hi) {
    double r = rng.uniform(lo, hi);
    long m = static_cast<long>(std::floor(r * 1048576.0)) | 1L;
    return ratio(m, 1048576);
}

}  // namespace

void Mod2Chain::toggle(QSimplex s) {
    std::sort(s.begin(), s.end());
    if (has_repeat(s)) return;
    auto it = simplices.find(s);
    if (it != simplices.end())
        simplices.erase(it);
    else
        simplices.insert(std::move(s));
}

void Mod2Chain::add(const Mod2Chain& other) {
    for (const auto& s : other.simplices) toggle(s);
}

QSimplex make_simplex(std::vector<QPoint> vertices) {
    std::sort(vertices.begin(), vertices.end());
    return vertices;
}

mpq_class exact(double x) { return mpq_class(x); }

QPoint exact_point(const std::vector<double>& x) {
    QPoint p;
    for (double v : x) p.push_back(exact(v));
    return p;
}

Mod2Chain relative(const Mod2Chain& z) {
    Mod2Chain out{z.dim, z.ambient, {}};
    for (const auto& s : z.simplices)
        if (!in_facet(s)) out.simplices.insert(s);
    return out;
}

Mod2Chain boundary(const Mod2Chain& z) { return relative(full_boundary(z)); }

bool is_relative_cycle(const Mod2Chain& z) { return z.dim == 0 || boundary(z).empty(); }

mpq_class CoverLedger::weight() const {
    mpq_class w = 0;
    for (const auto& c : cubes) w += qpow(c.edge, k);
    return w;
}

bool CoverLedger::covers(const Mod2Chain& z) const {
    for (const auto& s : z.simplices) {
        bool ok = false;
        for (const auto& c : cubes) {
            if (strictly_inside(c, s)) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

CoverLedger cover_chain(const Mod2Chain& z) {
    CoverLedger out{z.dim, {}};
    const mpq_class unit = ratio(1, 1024);
    for (const auto& s : z.simplices) {
        const std::size_t n = s.front().size();
        QPoint lo(n);
        mpq_class edge = 0;
        for (std::size_t b = 0; b < n; ++b) {
            mpq_class mn = s.front()[b], mx = s.front()[b];
            for (const auto& v : s) {
                mn = std::min(mn, v[b]);
                mx = std::max(mx, v[b]);
            }
            mpq_class a = mn * 1024, c = mx * 1024;
            mpz_class fa, cc;
            mpz_fdiv_q(fa.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
            mpz_cdiv_q(cc.get_mpz_t(), c.get_num_mpz_t(), c.get_den_mpz_t());
            lo[b] = mpq_class(fa - 1) * unit;
            edge = std::max(edge, mpq_class(mpq_class(cc + 1) * unit - lo[b]));
        }
        QCube cube{lo, edge};
        if (std::find(out.cubes.begin(), out.cubes.end(), cube) == out.cubes.end()) out.cubes.push_back(cube);
    }
    return out;
}

CoverLedger merge_covers(const CoverLedger& a, const CoverLedger& b) {
    if (a.k != b.k) throw UsageError("merge_covers: ledgers measure different dimensions");
    CoverLedger out = a;
    for (const auto& c : b.cubes)
        if (std::find(out.cubes.begin(), out.cubes.end(), c) == out.cubes.end()) out.cubes.push_back(c);
    return out;
}

mpq_class cut_cost(const CoverLedger& cover, int axis, const mpq_class& t) {
    mpq_class s = 0;
    for (const auto& c : cover.cubes)
        if (c.corner[axis] < t && c.corner[axis] + c.edge > t) s += qpow(c.edge, cover.k - 1);
    return s;
}

mpq_class choose_cut(const CoverLedger& cover, int axis) {
    if (cover.cubes.empty()) throw UsageError("choose_cut: empty cover");
    std::vector<mpq_class> breaks{0, 1};
    for (const auto& c : cover.cubes) {
        for (mpq_class x : {c.corner[axis], mpq_class(c.corner[axis] + c.edge)})
            if (x > 0 && x < 1) breaks.push_back(x);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    mpq_class best_t, best_s;
    bool first = true;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        mpq_class mid = (breaks[i] + breaks[i + 1]) / 2;
        mpq_class s = cut_cost(cover, axis, mid);
        if (first || s < best_s) {
            best_s = s;
            best_t = mid;
            first = false;
        }
    }
    return best_t;
}

Mod2Chain cone_to_facet(const Mod2Chain& z, int axis, int side) {
    if (axis < 0 || axis >= z.ambient) throw UsageError("cone_to_facet: axis out of range");
    if (side != 0 && side != 1) throw UsageError("cone_to_facet: side must be 0 or 1");
    const mpq_class far = 1 - side;
    Mod2Chain out{z.dim + 1, z.ambient, {}};
    for (const auto& s : z.simplices) {
        for (const auto& v : s)
            if (v[axis] == far) throw UsageError("cone_to_facet: chain touches the opposite facet");
        QSimplex proj = s;
        for (auto& v : proj) v[axis] = side;
        for (std::size_t i = 0; i < s.size(); ++i) {
            QSimplex piece(s.begin(), s.begin() + i + 1);
            piece.insert(piece.end(), proj.begin() + i, proj.end());
            out.toggle(std::move(piece));
        }
    }
    return out;
}

CutResult cut_chain(const Mod2Chain& z, int axis, const mpq_class& t) {
    CutResult r{{z.dim, z.ambient, {}}, {z.dim, z.ambient, {}}, {z.dim - 1, z.ambient, {}}};
    for (const auto& s : z.simplices) {
        Sides sd = sides_of(s, axis, t);
        if (sd.lower)
            for (auto& p : side_piece(s, axis, t, true)) r.lower.toggle(p);
        if (sd.upper)
            for (auto& p : side_piece(s, axis, t, false)) r.upper.toggle(p);
    }
    r.slice = boundary(r.lower);
    return r;
}

Mod2Chain subdivision_homotopy(const Mod2Chain& z, int axis, const mpq_class& t) {
    std::map<QSimplex, Mod2Chain> memo;
    Mod2Chain out{z.dim + 1, z.ambient, {}};
    for (const auto& s : z.simplices) out.add(homotopy_of(s, z.ambient, axis, t, memo));
    return out;
}

std::int64_t filling_constant(int k) { return (std::int64_t{1} << (k + 2)) - 2; }

FillResult fill(const Mod2Chain& z, const CoverLedger& cover, int first_axis) {
    if (cover.k != z.dim) throw UsageError("fill: ledger dimension differs from the cycle dimension");
    if (first_axis < 0 || first_axis + z.dim >= z.ambient)
        throw UsageError("fill: not enough axes left to recurse");
    check_ambient(z, cover);
    if (!is_relative_cycle(z)) throw UsageError("fill: chain is not a relative cycle");
    if (!cover.covers(z)) throw UsageError("fill: cover does not cover the chain");
    return {fill_chain(z, cover, first_axis), fill_ledger(cover, first_axis)};
}

Mod2Chain random_relative_cycle(int n, int k, Rng& rng) {
    if (n < 1 || n > 3 || k < 0 || k > std::min(2, n - 1))
        throw UsageError("random_relative_cycle: need n <= 3 and k <= min(2, n-1)");
    Mod2Chain z{k, n, {}};
    auto point = [&](double lo, double hi) {
        QPoint p(n);
        for (auto& x : p) x = odd_dyadic(rng, lo, hi);
        return p;
    };
    if (k == 0) {
        int count = 2 + static_cast<int>(rng.below(4));
        for (int i = 0; i < count; ++i) z.toggle({point(0.05, 0.95)});
        return z;
    }
    if (k == 1) {
        // Polyline between opposite facets.
        int axis = static_cast<int>(rng.below(static_cast<std::size_t>(n)));
        int segs = 4 + static_cast<int>(rng.below(3));
        QPoint a = point(0.1, 0.9), b = point(0.1, 0.9);
        a[axis] = 0;
        b[axis] = 1;
        std::vector<QPoint> path{a};
        for (int i = 1; i < segs; ++i) {
            QPoint p(n);
            double s = static_cast<double>(i) / segs;
            for (int j = 0; j < n; ++j) {
                double x = (1 - s) * a[j].get_d() + s * b[j].get_d() + rng.uniform(-0.08, 0.08);
                x = std::clamp(x, 0.02, 0.98);
                p[j] = odd_dyadic(rng, x, x + 1e-5);
            }
            path.push_back(p);
        }
        path.push_back(b);
        for (std::size_t i = 0; i + 1 < path.size(); ++i) z.toggle({path[i], path[i + 1]});
        // Closed loop.
        Eigen::VectorXd c(n), e1 = Eigen::VectorXd::Zero(n), e2 = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < n; ++j) c[j] = rng.uniform(0.3, 0.7);
        if (n == 2) {
            e1[0] = 1;
            e2[1] = 1;
        } else {
            e1 = rng.normal_vector(n).normalized();
            e2 = rng.normal_vector(n);
            e2 = (e2 - e2.dot(e1) * e1).normalized();
        }
        double r = rng.uniform(0.1, 0.25);
        int m = 5 + static_cast<int>(rng.below(4));
        std::vector<QPoint> loop;
        for (int i = 0; i < m; ++i) {
            double th = 2 * M_PI * i / m;
            QPoint p(n);
            for (int j = 0; j < n; ++j) {
                double x = c[j] + r * (std::cos(th) * e1[j] + std::sin(th) * e2[j]) + rng.uniform(-0.02, 0.02);
                p[j] = odd_dyadic(rng, x, x + 1e-5);
            }
            loop.push_back(p);
        }
        for (int i = 0; i < m; ++i) z.toggle({loop[i], loop[(i + 1) % m]});
        return z;
    }
    // k == 2, n == 3: graph surface over two axes plus a tetrahedron boundary.
    std::vector<int> axes{0, 1, 2};
    for (int i = 2; i > 0; --i) std::swap(axes[i], axes[rng.below(static_cast<std::size_t>(i + 1))]);
    const int g = 4;
    std::vector<QPoint> grid((g + 1) * (g + 1));
    for (int i = 0; i <= g; ++i)
        for (int j = 0; j <= g; ++j) {
            QPoint p(3);
            p[axes[0]] = ratio(i, g);
            p[axes[1]] = ratio(j, g);
            p[axes[2]] = odd_dyadic(rng, 0.3, 0.7);
            grid[i * (g + 1) + j] = p;
        }
    auto at = [&](int i, int j) { return grid[i * (g + 1) + j]; };
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            if (rng.below(2)) {
                z.toggle({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
                z.toggle({at(i, j), at(i, j + 1), at(i + 1, j + 1)});
            } else {
                z.toggle({at(i, j), at(i + 1, j), at(i, j + 1)});
                z.toggle({at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)});
            }
        }
    QPoint centre = point(0.25, 0.75);
    std::vector<QPoint> tet;
    for (int i = 0; i < 4; ++i) {
        QPoint p(3);
        for (int j = 0; j < 3; ++j) {
            double x = centre[j].get_d() + rng.uniform(-0.15, 0.15);
            p[j] = odd_dyadic(rng, x, x + 1e-5);
        }
        tet.push_back(p);
    }
    for (int skip = 0; skip < 4; ++skip) {
        QSimplex f;
        for (int i = 0; i < 4; ++i)
            if (i != skip) f.push_back(tet[i]);
        z.toggle(f);
    }
    return z;
}

void write_chain(std::ostream& out, const Mod2Chain& z) {
    out << "dim " << z.dim << '\n';
    for (const auto& s : z.simplices) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) out << " ;";
            for (const auto& x : s[i]) out << ' ' << x.get_str();
        }
        out << '\n';
    }
}

Mod2Chain read_chain(std::istream& in) {
    std::string tag;
    Mod2Chain z;
    if (!(in >> tag >> z.dim) || tag != "dim") throw UsageError("read_chain: missing 'dim k' header");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        QSimplex s;
        std::stringstream vs(line);
        std::string vertex;
        while (std::getline(vs, vertex, ';')) {
            std::stringstream cs(vertex);
            QPoint p;
            std::string tok;
            while (cs >> tok) {
                mpq_class q;
                if (q.set_str(tok, 10) != 0) throw UsageError("read_chain: bad rational '" + tok + "'");
                q.canonicalize();
                p.push_back(q);
            }
            s.push_back(p);
        }
        if (static_cast<int>(s.size()) != z.dim + 1) throw UsageError("read_chain: simplex with wrong vertex count");
        if (z.ambient == 0) z.ambient = static_cast<int>(s.front().size());
        for (const auto& p : s)
            if (static_cast<int>(p.size()) != z.ambient) throw UsageError("read_chain: inconsistent coordinates");
        z.toggle(s);
    }
    return z;
}

void write_ledger_csv(std::ostream& out, const CoverLedger& ledger) {
    out << "corner,edge,k,weight\n";
    for (const auto& c : ledger.cubes) {
        for (std::size_t i = 0; i < c.corner.size(); ++i) out << (i ? " " : "") << c.corner[i].get_str();
        out << ',' << c.edge.get_str() << ',' << ledger.k << ',' << qpow(c.edge, ledger.k).get_str() << '\n';
    }
}

int AbstractComplex::dim() const {
    int d = -1;
    for (const auto& s : top) d = std::max(d, static_cast<int>(s.size()) - 1);
    return d;
}

AbstractComplex random_complex(int k, Rng& rng) {
    if (k < 0) throw DomainError("random_complex: negative dimension");
    AbstractComplex c;
    const int pool = k + 4;
    const int count = 2 + static_cast<int>(rng.below(4));
    for (int i = 0; i < count; ++i) {
        std::vector<int> v(pool);
        std::iota(v.begin(), v.end(), 0);
        for (int j = pool - 1; j > 0; --j) std::swap(v[j], v[rng.below(static_cast<std::size_t>(j + 1))]);
        v.resize(k + 1);
        std::sort(v.begin(), v.end());
        c.top.push_back(v);
    }
    return c;
}

StarAssignment star_assignment(const AbstractComplex& complex) {
    StarAssignment r;
    r.k = complex.dim();
    if (r.k < 0) return r;
    std::map<std::vector<int>, int> ids;
    for (auto top : complex.top) {
        std::sort(top.begin(), top.end());
        top.erase(std::unique(top.begin(), top.end()), top.end());
        const int m = static_cast<int>(top.size());
        for (int mask = 1; mask < (1 << m); ++mask) {
            std::vector<int> f;
            for (int i = 0; i < m; ++i)
                if (mask >> i & 1) f.push_back(top[i]);
            if (ids.emplace(f, static_cast<int>(ids.size())).second) r.face_vertices.push_back(f);
        }
    }
    const int F = static_cast<int>(r.face_vertices.size());
    std::vector<std::vector<int>> above(F);
    for (int a = 0; a < F; ++a)
        for (int b = 0; b < F; ++b) {
            const auto &fa = r.face_vertices[a], &fb = r.face_vertices[b];
            if (fb.size() > fa.size() && std::includes(fb.begin(), fb.end(), fa.begin(), fa.end()))
                above[a].push_back(b);
        }
    std::vector<std::set<int>> star(F);
    std::vector<int> chain;
    auto visit = [&](auto&& self, int last) -> void {
        r.assignment.push_back({chain, chain.front()});
        for (int u : chain) star[u].insert(chain.front());
        for (int b : above[last]) {
            chain.push_back(b);
            self(self, b);
            chain.pop_back();
        }
    };
    for (int a = 0; a < F; ++a) {
        chain.assign(1, a);
        visit(visit, a);
    }
    r.faces = static_cast<std::size_t>(F);
    r.chains = r.assignment.size();
    for (const auto& s : star) r.max_star = std::max(r.max_star, static_cast<int>(s.size()));
    r.stated_bound = (std::int64_t{1} << r.k) - 1;
    r.corrected_bound = (std::int64_t{1} << (r.k + 1)) - 1;
    return r;
}

ColouredGrid random_coloured_grid(int n, int m, int parts, Rng& rng) {
    ColouredGrid g{n, m, parts, {}};
    std::size_t size = 1;
    for (int i = 0; i < n; ++i) size *= static_cast<std::size_t>(m);
    for (std::size_t i = 0; i < size; ++i) g.colour.push_back(static_cast<int>(rng.below(static_cast<std::size_t>(parts))));
    return g;
}

namespace {

void validate_grid(const ColouredGrid& g) {
    if (g.n < 1 || g.n > 3) throw UsageError("partition: need 1 <= n <= 3");
    if (g.m < 2) throw UsageError("partition: need at least 2 grid points per axis");
    if (g.parts < 1 || g.parts > 6) throw UsageError("partition: need 1 to 6 parts");
    std::size_t size = 1;
    for (int i = 0; i < g.n; ++i) size *= static_cast<std::size_t>(g.m);
    if (g.colour.size() != size) throw UsageError("partition: colour table has the wrong size");
    for (int c : g.colour)
        if (c < 0 || c >= g.parts) throw UsageError("partition: colour out of range; not a partition");
}

// Barycentre of a set of grid vertices, moved by at most 2^-20 along the
// coordinates not pinned to the cube boundary.
QPoint face_point(const ColouredGrid& g, const std::vector<int>& face) {
    QPoint p(g.n, mpq_class(0));
    for (int v : face) {
        int idx = v;
        for (int b = 0; b < g.n; ++b) {
            p[b] += ratio(idx % g.m, g.m - 1);
            idx /= g.m;
        }
    }
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (int v : face) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
    for (int b = 0; b < g.n; ++b) {
        p[b] /= static_cast<long>(face.size());
        if (p[b] == 0 || p[b] == 1) continue;
        long jitter = static_cast<long>((h >> (16 * b)) & 0xFFFF) - 32768;
        p[b] += ratio(jitter, 1L << 35);
    }
    return p;
}

std::vector<std::vector<int>> freudenthal(const ColouredGrid& g) {
    std::vector<std::vector<int>> out;
    std::vector<int> cell(g.n, 0), stride(g.n, 1);
    for (int b = 1; b < g.n; ++b) stride[b] = stride[b - 1] * g.m;
    while (true) {
        std::vector<int> perm(g.n);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            int v = 0;
            for (int b = 0; b < g.n; ++b) v += cell[b] * stride[b];
            std::vector<int> s{v};
            for (int b : perm) s.push_back(v += stride[b]);
            out.push_back(s);
        } while (std::next_permutation(perm.begin(), perm.end()));
        int j = 0;
        while (j < g.n && ++cell[j] == g.m - 1) cell[j++] = 0;
        if (j == g.n) break;
    }
    return out;
}

}  // namespace

Mod2Chain partition_chain(const ColouredGrid& g, const std::vector<int>& index_set) {
    validate_grid(g);
    std::vector<int> want = index_set;
    std::sort(want.begin(), want.end());
    const int j = static_cast<int>(want.size()) - 1;
    Mod2Chain out{g.n - j, g.n, {}};
    if (j < 0 || j > g.n) return out;
    std::map<std::vector<int>, QPoint> points;
    auto point_of = [&](std::vector<int> f) {
        std::sort(f.begin(), f.end());
        auto it = points.find(f);
        if (it == points.end()) it = points.emplace(f, face_point(g, f)).first;
        return it->second;
    };
    for (const auto& top : freudenthal(g)) {
        std::set<QSimplex> pieces;
        std::vector<int> order = top;
        std::sort(order.begin(), order.end());
        do {
            std::vector<int> cols;
            for (int i = 0; i <= j; ++i) cols.push_back(g.colour[order[i]]);
            std::sort(cols.begin(), cols.end());
            if (cols != want) continue;
            QSimplex s;
            for (int i = j; i <= g.n; ++i) s.push_back(point_of(std::vector<int>(order.begin(), order.begin() + i + 1)));
            pieces.insert(make_simplex(s));
        } while (std::next_permutation(order.begin(), order.end()));
        for (const auto& s : pieces) out.toggle(s);
    }
    return out;
}

PartitionReport partition_boundary_identity(const ColouredGrid& g) {
    validate_grid(g);
    PartitionReport r;
    r.parts = g.parts;
    std::map<int, Mod2Chain> chains;
    auto chain_of = [&](int mask) -> const Mod2Chain& {
        auto it = chains.find(mask);
        if (it == chains.end()) {
            std::vector<int> set;
            for (int i = 0; i < g.parts; ++i)
                if (mask >> i & 1) set.push_back(i);
            it = chains.emplace(mask, partition_chain(g, set)).first;
        }
        return it->second;
    };
    for (int mask = 1; mask < (1 << g.parts); ++mask) {
        if (std::popcount(static_cast<unsigned>(mask)) > g.n + 1) continue;
        ++r.index_sets;
        const Mod2Chain& c = chain_of(mask);
        if (!c.empty()) ++r.nonempty;
        Mod2Chain rhs{c.dim - 1, g.n, {}};
        for (int i = 0; i < g.parts; ++i)
            if (!(mask >> i & 1)) rhs.add(chain_of(mask | (1 << i)));
        if (boundary(c).simplices != rhs.simplices) ++r.failures;
    }
    r.holds = r.failures == 0;
    return r;
}

}  // namespace waistlab
