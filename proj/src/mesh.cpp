#include "waistlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "waistlab/errors.hpp"

namespace waistlab {

Mat SubmanifoldMesh::simplex_matrix(std::size_t i) const {
    const auto& s = simplices[i];
    Mat m(ambient, static_cast<int>(s.size()));
    for (std::size_t j = 0; j < s.size(); ++j) m.col(static_cast<int>(j)) = vertices[s[j]];
    return m;
}

double SubmanifoldMesh::simplex_volume(std::size_t i) const {
    if (dim == 0) return 1.0;
    Mat m = simplex_matrix(i);
    Mat edges = m.rightCols(dim).colwise() - m.col(0);
    return gram_volume(edges) / std::tgamma(dim + 1.0);
}

double SubmanifoldMesh::volume() const {
    double v = 0.0;
    for (std::size_t i = 0; i < simplices.size(); ++i) v += simplex_volume(i);
    return v;
}

void SubmanifoldMesh::validate() const {
    for (const auto& v : vertices)
        if (v.size() != ambient) throw UsageError("mesh: vertex with wrong coordinate count");
    for (std::size_t i = 0; i < simplices.size(); ++i) {
        const auto& s = simplices[i];
        if (static_cast<int>(s.size()) != dim + 1) throw UsageError("mesh: simplex with wrong vertex count");
        for (int idx : s)
            if (idx < 0 || static_cast<std::size_t>(idx) >= vertices.size())
                throw UsageError("mesh: simplex index out of range");
        if (dim > 0 && simplex_volume(i) <= 1e-14) throw UsageError("mesh: degenerate simplex");
    }
}

void SubmanifoldMesh::append(const SubmanifoldMesh& other) {
    if (vertices.empty() && simplices.empty()) {
        *this = other;
        return;
    }
    if (other.dim != dim || other.ambient != ambient) throw UsageError("mesh append: shape mismatch");
    int offset = static_cast<int>(vertices.size());
    vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
    for (auto s : other.simplices) {
        for (int& i : s) i += offset;
        simplices.push_back(std::move(s));
    }
}

void write_mesh(std::ostream& out, const SubmanifoldMesh& mesh) {
    out.precision(17);
    int n = mesh.spherical ? mesh.ambient - 1 : mesh.ambient;
    out << "dim " << n << ' ' << mesh.dim << ' ' << (mesh.spherical ? "sphere" : "euclidean") << '\n';
    for (const auto& v : mesh.vertices) {
        out << 'v';
        for (int i = 0; i < v.size(); ++i) out << ' ' << v[i];
        out << '\n';
    }
    for (const auto& s : mesh.simplices) {
        out << 's';
        for (int i : s) out << ' ' << i;
        out << '\n';
    }
}

SubmanifoldMesh read_mesh(std::istream& in) {
    SubmanifoldMesh mesh;
    bool header = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "dim") {
            int n = 0, d = 0;
            std::string kind = "sphere";
            if (!(ls >> n >> d)) throw UsageError("mesh: malformed header at line " + std::to_string(lineno));
            ls >> kind;
            if (kind != "sphere" && kind != "euclidean")
                throw UsageError("mesh: unknown embedding '" + kind + "'");
            mesh.spherical = kind == "sphere";
            mesh.ambient = mesh.spherical ? n + 1 : n;
            mesh.dim = d;
            header = true;
        } else if (tag == "v") {
            if (!header) throw UsageError("mesh: vertex before header");
            Vec v(mesh.ambient);
            for (int i = 0; i < mesh.ambient; ++i)
                if (!(ls >> v[i])) throw UsageError("mesh: short vertex line " + std::to_string(lineno));
            mesh.vertices.push_back(v);
        } else if (tag == "s") {
            if (!header) throw UsageError("mesh: simplex before header");
            std::vector<int> s(mesh.dim + 1);
            for (auto& i : s)
                if (!(ls >> i)) throw UsageError("mesh: short simplex line " + std::to_string(lineno));
            mesh.simplices.push_back(s);
        } else {
            throw UsageError("mesh: unknown record '" + tag + "' at line " + std::to_string(lineno));
        }
    }
    if (!header) throw UsageError("mesh: missing header");
    mesh.validate();
    return mesh;
}

SubmanifoldMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open mesh file " + path);
    return read_mesh(in);
}

void save_mesh(const std::string& path, const SubmanifoldMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write mesh file " + path);
    write_mesh(out, mesh);
}

SubmanifoldMesh great_sphere_mesh(const Mat& frame, int m) {
    const int d = static_cast<int>(frame.cols()) - 1;
    SubmanifoldMesh mesh;
    mesh.dim = d;
    mesh.ambient = static_cast<int>(frame.rows());
    mesh.spherical = true;
    if (d == 0) {
        mesh.vertices = {frame.col(0), -frame.col(0)};
        mesh.simplices = {{0}, {1}};
        return mesh;
    }
    if (m < 1) throw DomainError("great_sphere_mesh: resolution must be >= 1");
    const int D = d + 1;
    std::map<std::vector<int>, int> index;
    auto vertex = [&](const std::vector<int>& g) {
        auto it = index.find(g);
        if (it != index.end()) return it->second;
        Vec u(D);
        for (int i = 0; i < D; ++i) u[i] = -1.0 + 2.0 * g[i] / m;
        int id = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(frame * (u / u.norm()));
        index.emplace(g, id);
        return id;
    };
    // Kuhn triangulation of every cell of every facet of [-1,1]^{d+1}.
    std::vector<int> perm(d);
    for (int axis = 0; axis < D; ++axis) {
        std::vector<int> free_axes;
        for (int i = 0; i < D; ++i)
            if (i != axis) free_axes.push_back(i);
        for (int side : {0, m}) {
            std::vector<int> cell(d, 0);
            while (true) {
                std::iota(perm.begin(), perm.end(), 0);
                do {
                    std::vector<int> g(D);
                    g[axis] = side;
                    for (int j = 0; j < d; ++j) g[free_axes[j]] = cell[j];
                    std::vector<int> s{vertex(g)};
                    for (int j = 0; j < d; ++j) {
                        ++g[free_axes[perm[j]]];
                        s.push_back(vertex(g));
                    }
                    mesh.simplices.push_back(s);
                } while (std::next_permutation(perm.begin(), perm.end()));
                int j = 0;
                while (j < d && ++cell[j] == m) cell[j++] = 0;
                if (j == d) break;
            }
        }
    }
    return mesh;
}

SubmanifoldMesh polyline_mesh(const std::vector<Vec>& points, bool closed, bool spherical) {
    SubmanifoldMesh mesh;
    mesh.dim = 1;
    mesh.ambient = points.empty() ? 0 : static_cast<int>(points.front().size());
    mesh.spherical = spherical;
    mesh.vertices = points;
    int n = static_cast<int>(points.size());
    for (int i = 0; i + 1 < n; ++i) mesh.simplices.push_back({i, i + 1});
    if (closed && n > 2) mesh.simplices.push_back({n - 1, 0});
    return mesh;
}

SubmanifoldMesh surface_mesh(const std::function<Vec(double, double)>& param, int nu, int nv,
                             bool periodic_u, bool periodic_v, bool spherical) {
    SubmanifoldMesh mesh;
    mesh.dim = 2;
    mesh.spherical = spherical;
    int cu = periodic_u ? nu : nu + 1;
    int cv = periodic_v ? nv : nv + 1;
    for (int i = 0; i < cu; ++i)
        for (int j = 0; j < cv; ++j)
            mesh.vertices.push_back(param(static_cast<double>(i) / nu, static_cast<double>(j) / nv));
    mesh.ambient = static_cast<int>(mesh.vertices.front().size());
    auto id = [&](int i, int j) { return (i % cu) * cv + (j % cv); };
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), e = id(i, j + 1);
            mesh.simplices.push_back({a, b, c});
            mesh.simplices.push_back({a, c, e});
        }
    return mesh;
}

}  // namespace waistlab
