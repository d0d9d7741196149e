#include "waistlab/isoperimetry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "waistlab/errors.hpp"
#include "waistlab/quadrature.hpp"

namespace waistlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> strides(const BinaryField& f) {
    std::vector<std::size_t> s(f.resolution.size());
    std::size_t acc = 1;
    for (std::size_t j = 0; j < s.size(); ++j) {
        s[j] = acc;
        acc *= static_cast<std::size_t>(f.resolution[j]);
    }
    return s;
}

// 1-D squared distance transform (lower envelope of parabolas) with spacing h.
void dt1d(const std::vector<double>& f, double h, std::vector<double>& d) {
    const int n = static_cast<int>(f.size());
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (!std::isfinite(f[q])) continue;
        double xq = q * h;
        while (k >= 0) {
            double xv = v[k] * h;
            double s = ((f[q] + xq * xq) - (f[v[k]] + xv * xv)) / (2.0 * (xq - xv));
            if (s <= z[k]) {
                --k;
            } else {
                v[++k] = q;
                z[k] = s;
                z[k + 1] = kInf;
                break;
            }
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
        }
    }
    d.assign(n, kInf);
    if (k < 0) return;
    int j = 0;
    for (int q = 0; q < n; ++q) {
        double x = q * h;
        while (z[j + 1] < x) ++j;
        double dx = x - v[j] * h;
        d[q] = dx * dx + f[v[j]];
    }
}

}  // namespace

double BinaryField::cell_volume() const {
    double v = 1.0;
    for (int j = 0; j < dims(); ++j) v *= spacing(j);
    return v;
}

double BinaryField::occupancy() const {
    if (cells.empty()) return 0.0;
    std::size_t c = 0;
    for (auto b : cells) c += b ? 1 : 0;
    return static_cast<double>(c) / static_cast<double>(cells.size());
}

std::size_t BinaryField::index(const std::vector<int>& c) const {
    auto s = strides(*this);
    std::size_t idx = 0;
    for (std::size_t j = 0; j < c.size(); ++j) idx += s[j] * static_cast<std::size_t>(c[j]);
    return idx;
}

std::vector<int> BinaryField::cell(std::size_t idx) const {
    std::vector<int> c(resolution.size());
    for (std::size_t j = 0; j < c.size(); ++j) {
        c[j] = static_cast<int>(idx % static_cast<std::size_t>(resolution[j]));
        idx /= static_cast<std::size_t>(resolution[j]);
    }
    return c;
}

void BinaryField::validate() const {
    if (resolution.empty() || resolution.size() != lengths.size())
        throw UsageError("binary field: resolution and lengths must have the same nonzero size");
    std::size_t total = 1;
    for (std::size_t j = 0; j < resolution.size(); ++j) {
        if (resolution[j] < 1 || !(lengths[j] > 0)) throw UsageError("binary field: bad resolution or length");
        total *= static_cast<std::size_t>(resolution[j]);
    }
    if (cells.size() != total) throw UsageError("binary field: cell count does not match the resolution");
}

BinaryField empty_field(std::vector<double> lengths, std::vector<int> resolution, bool periodic) {
    BinaryField f;
    f.lengths = std::move(lengths);
    f.resolution = std::move(resolution);
    f.periodic = periodic;
    std::size_t total = 1;
    for (int r : f.resolution) total *= static_cast<std::size_t>(std::max(r, 0));
    f.cells.assign(total, 0);
    f.validate();
    return f;
}

BinaryField half_slab(std::vector<double> lengths, std::vector<int> resolution, bool periodic, int axis) {
    BinaryField f = empty_field(std::move(lengths), std::move(resolution), periodic);
    if (axis < 0 || axis >= f.dims()) throw UsageError("half_slab: axis out of range");
    for (std::size_t i = 0; i < f.size(); ++i)
        f.cells[i] = 2 * f.cell(i)[axis] < f.resolution[axis] ? 1 : 0;
    return f;
}

BinaryField random_half_volume(std::vector<double> lengths, std::vector<int> resolution, bool periodic, Rng& rng) {
    BinaryField f = empty_field(std::move(lengths), std::move(resolution), periodic);
    const int n = f.dims();
    struct Mode {
        std::vector<int> freq;
        double amp, phase;
    };
    std::vector<Mode> modes;
    for (int m = 0; m < 8; ++m) {
        Mode md;
        md.freq.resize(n);
        bool zero = true;
        for (int j = 0; j < n; ++j) {
            md.freq[j] = static_cast<int>(rng.below(7)) - 3;
            zero = zero && md.freq[j] == 0;
        }
        if (zero) md.freq[0] = 1;
        md.amp = rng.normal();
        md.phase = 2.0 * std::numbers::pi * rng.uniform();
        modes.push_back(std::move(md));
    }
    std::vector<double> value(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto c = f.cell(i);
        double v = 0.0;
        for (const auto& md : modes) {
            double arg = md.phase;
            for (int j = 0; j < n; ++j) {
                double u = (c[j] + 0.5) / f.resolution[j];
                // Integer frequencies keep the field periodic; boxes use half-integer ones too.
                double w = periodic ? md.freq[j] : 0.5 * md.freq[j];
                arg += 2.0 * std::numbers::pi * w * u;
            }
            v += md.amp * std::cos(arg);
        }
        value[i] = v;
    }
    std::vector<std::size_t> order(f.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    for (std::size_t r = 0; r < order.size() / 2; ++r) f.cells[order[r]] = 1;
    return f;
}

void write_field(std::ostream& out, const BinaryField& f) {
    f.validate();
    out << "binaryfield\ndims " << f.dims() << "\nresolution";
    for (int r : f.resolution) out << ' ' << r;
    out << "\nlengths";
    out.precision(17);
    for (double a : f.lengths) out << ' ' << a;
    out << "\nperiodic " << (f.periodic ? 1 : 0) << "\ndata\n";
    out.write(reinterpret_cast<const char*>(f.cells.data()), static_cast<std::streamsize>(f.cells.size()));
}

BinaryField read_field(std::istream& in) {
    std::string line, word;
    BinaryField f;
    int dims = -1;
    if (!std::getline(in, line) || line != "binaryfield") throw UsageError("read_field: missing 'binaryfield' header");
    while (std::getline(in, line)) {
        if (line == "data") break;
        std::istringstream ls(line);
        ls >> word;
        if (word == "dims") {
            ls >> dims;
        } else if (word == "resolution") {
            for (int r; ls >> r;) f.resolution.push_back(r);
        } else if (word == "lengths") {
            for (double a; ls >> a;) f.lengths.push_back(a);
        } else if (word == "periodic") {
            int p = 1;
            ls >> p;
            f.periodic = p != 0;
        } else {
            throw UsageError("read_field: unknown header line '" + line + "'");
        }
    }
    if (dims != static_cast<int>(f.resolution.size())) throw UsageError("read_field: dims does not match resolution");
    std::size_t total = 1;
    for (int r : f.resolution) total *= static_cast<std::size_t>(std::max(r, 0));
    f.cells.resize(total);
    in.read(reinterpret_cast<char*>(f.cells.data()), static_cast<std::streamsize>(total));
    if (static_cast<std::size_t>(in.gcount()) != total) throw UsageError("read_field: truncated cell data");
    for (auto& c : f.cells) c = c ? 1 : 0;
    f.validate();
    return f;
}

void save_field(const std::string& path, const BinaryField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("save_field: cannot open " + path);
    write_field(out, field);
}

BinaryField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("load_field: cannot open " + path);
    return read_field(in);
}

double gaussian_profile(double t) {
    if (t < 0) throw DomainError("gaussian_profile: t must be nonnegative");
    if (std::isinf(t)) return 1.0;
    return integrate([](double s) { return std::exp(-std::numbers::pi * s * s); }, -t, t);
}

namespace {

// Number of occupied cells in the cyclic box.
std::size_t box_count(const BinaryField& f, const std::vector<int>& start, const std::vector<int>& extent) {
    const int n = f.dims();
    std::vector<int> offs(n, 0), cell(n);
    std::size_t count = 0;
    while (true) {
        for (int j = 0; j < n; ++j) cell[j] = (start[j] + offs[j]) % f.resolution[j];
        count += f.cells[f.index(cell)];
        int j = 0;
        while (j < n && ++offs[j] == extent[j]) offs[j++] = 0;
        if (j == n) break;
    }
    return count;
}

void halve(const BinaryField& f, int axis, std::vector<int> start, std::vector<int> extent,
           std::vector<HalvingBox>& out) {
    const int n = f.dims();
    auto cells_in = [&](const std::vector<int>& e) {
        std::size_t c = 1;
        for (int j = 0; j < n; ++j) c *= static_cast<std::size_t>(e[j]);
        return c;
    };
    if (axis == n) {
        double occ = static_cast<double>(box_count(f, start, extent)) / static_cast<double>(cells_in(extent));
        out.push_back({start, extent, occ});
        return;
    }
    const int r = f.resolution[axis];
    std::vector<int> half = extent;
    half[axis] = r / 2;
    double target = 0.5 * static_cast<double>(cells_in(half));
    int best_shift = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int s = 0; s < r; ++s) {
        std::vector<int> st = start;
        st[axis] = s;
        double gap = std::abs(static_cast<double>(box_count(f, st, half)) - target);
        if (gap < best_gap) {
            best_gap = gap;
            best_shift = s;
        }
    }
    for (int side = 0; side < 2; ++side) {
        std::vector<int> st = start;
        st[axis] = (best_shift + side * (r / 2)) % r;
        halve(f, axis + 1, st, half, out);
    }
}

}  // namespace

std::vector<HalvingBox> torus_halving_translations(const BinaryField& f) {
    f.validate();
    if (!f.periodic) throw UsageError("torus_halving_translations: field must be periodic");
    for (int r : f.resolution)
        if (r % 2) throw UsageError("torus_halving_translations: resolutions must be even");
    double half_cells = 0.5 * static_cast<double>(f.size());
    double occupied = f.occupancy() * static_cast<double>(f.size());
    if (std::abs(occupied - half_cells) > 1.0) throw UsageError("torus_halving_translations: M is not of half volume");
    std::vector<HalvingBox> out;
    halve(f, 0, std::vector<int>(f.dims(), 0), f.resolution, out);
    return out;
}

bool boxes_tile(const BinaryField& f, const std::vector<HalvingBox>& boxes) {
    std::vector<int> cover(f.size(), 0);
    const int n = f.dims();
    for (const auto& b : boxes) {
        std::vector<int> offs(n, 0), cell(n);
        while (true) {
            for (int j = 0; j < n; ++j) cell[j] = (b.start[j] + offs[j]) % f.resolution[j];
            ++cover[f.index(cell)];
            int j = 0;
            while (j < n && ++offs[j] == b.extent[j]) offs[j++] = 0;
            if (j == n) break;
        }
    }
    return std::all_of(cover.begin(), cover.end(), [](int c) { return c == 1; });
}

std::vector<double> squared_distance_transform(const BinaryField& f, const std::vector<std::uint8_t>& target) {
    const int n = f.dims();
    auto st = strides(f);
    std::vector<double> d(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) d[i] = target[i] ? 0.0 : kInf;
    std::vector<double> line, out;
    for (int axis = 0; axis < n; ++axis) {
        const int r = f.resolution[axis];
        const double h = f.spacing(axis);
        const int copies = f.periodic ? 3 : 1;
        for (std::size_t base = 0; base < f.size(); ++base) {
            if (f.cell(base)[axis] != 0) continue;
            line.assign(static_cast<std::size_t>(r * copies), kInf);
            for (int c = 0; c < copies; ++c)
                for (int i = 0; i < r; ++i) line[c * r + i] = d[base + st[axis] * i];
            dt1d(line, h, out);
            int off = f.periodic ? r : 0;
            for (int i = 0; i < r; ++i) d[base + st[axis] * i] = out[off + i];
        }
    }
    return d;
}

namespace {

// Repeats cells along coarse axes so every axis has the finest spacing; the
// partial-cell rule below assumes isotropic cells.
BinaryField isotropic(const BinaryField& f) {
    double h = f.spacing(0);
    for (int j = 1; j < f.dims(); ++j) h = std::min(h, f.spacing(j));
    std::vector<int> factor(f.dims()), res(f.dims());
    bool same = true;
    for (int j = 0; j < f.dims(); ++j) {
        factor[j] = static_cast<int>(std::lround(f.spacing(j) / h));
        if (std::abs(factor[j] * h - f.spacing(j)) > 1e-9 * h)
            throw UsageError("boundary_content: cell spacings must be integer multiples of each other");
        res[j] = f.resolution[j] * factor[j];
        same = same && factor[j] == 1;
    }
    if (same) return f;
    BinaryField g = empty_field(f.lengths, res, f.periodic);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto c = g.cell(i);
        for (int j = 0; j < g.dims(); ++j) c[j] /= factor[j];
        g.cells[i] = f.cells[f.index(c)];
    }
    return g;
}

}  // namespace

EstimateReport boundary_content(const BinaryField& field, const std::vector<double>& multiples) {
    field.validate();
    const BinaryField f = isotropic(field);
    if (multiples.size() < 2) throw UsageError("boundary_content: need at least two radii");
    EstimateReport r;
    r.method = "grid_distance_transform";
    double occ = f.occupancy();
    if (occ == 0.0 || occ == 1.0) {
        r.diagnostics = {{"degenerate", 1.0}};
        return r;
    }
    std::vector<std::uint8_t> inside = f.cells, outside(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) outside[i] = f.cells[i] ? 0 : 1;
    auto to_out = squared_distance_transform(f, outside);
    auto to_in = squared_distance_transform(f, inside);
    double h = 0.0;
    for (int j = 0; j < f.dims(); ++j) h = std::max(h, f.spacing(j));
    // Distance of a cell centre to the interface: half a cell short of the
    // nearest opposite centre.
    std::vector<double> dist(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) dist[i] = std::sqrt(f.cells[i] ? to_out[i] : to_in[i]) - 0.5 * h;
    const double cv = f.cell_volume();
    std::vector<double> ts, ratios;
    for (double m : multiples) {
        double t = m * h;
        double vol = 0.0;
        for (double d : dist) vol += cv * std::clamp((t - (d - 0.5 * h)) / h, 0.0, 1.0);
        ts.push_back(t);
        ratios.push_back(vol / (2.0 * t));
    }
    // Least-squares line through (t, ratio), evaluated at 0.
    double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / ts.size();
    double mr = std::accumulate(ratios.begin(), ratios.end(), 0.0) / ratios.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxy += (ts[i] - mt) * (ratios[i] - mr);
        sxx += (ts[i] - mt) * (ts[i] - mt);
    }
    double slope = sxy / sxx;
    double resid = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double e = ratios[i] - (mr + slope * (ts[i] - mt));
        resid += e * e;
    }
    r.value = mr - slope * mt;
    r.std_error = 0.0;
    r.samples = static_cast<std::int64_t>(f.size());
    r.diagnostics = {{"resolution_spacing", h}, {"slope", slope}, {"residual", std::sqrt(resid / ts.size())}};
    for (std::size_t i = 0; i < ts.size(); ++i) r.diagnostics.emplace_back("ratio@" + std::to_string(ts[i]), ratios[i]);
    return r;
}

}  // namespace waistlab
