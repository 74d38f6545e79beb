#include "parcelca/features.hpp"

#include "parcelca/error.hpp"
#include "parcelca/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace parcelca {

void VariableGrid::validate() const {
    if (ncols <= 0 || nrows <= 0) throw ValueError("grid: non-positive dimensions");
    if (cell_size <= 0.0) throw ValueError("grid: non-positive cell size");
    if (values.size() != static_cast<std::size_t>(ncols) * static_cast<std::size_t>(nrows))
        throw ValueError("grid: value count does not match ncols*nrows");
}

GridExtent extent_for(const geom::Box& box, double cell_size, double margin) {
    if (cell_size <= 0.0) throw ValueError("extent_for: non-positive cell size");
    GridExtent e;
    e.cell_size = cell_size;
    e.origin = {std::floor((box.minx - margin) / cell_size) * cell_size,
                std::floor((box.miny - margin) / cell_size) * cell_size};
    e.ncols = std::max(1, static_cast<int>(std::ceil((box.maxx + margin - e.origin.x) / cell_size)));
    e.nrows = std::max(1, static_cast<int>(std::ceil((box.maxy + margin - e.origin.y) / cell_size)));
    return e;
}

namespace {

VariableGrid empty_grid(const GridExtent& e) {
    VariableGrid g;
    g.origin = e.origin;
    g.cell_size = e.cell_size;
    g.ncols = e.ncols;
    g.nrows = e.nrows;
    g.values.assign(static_cast<std::size_t>(e.ncols) * static_cast<std::size_t>(e.nrows), 0.0);
    return g;
}

} // namespace

VariableGrid distance_grid(const std::vector<geom::Point>& sources, const GridExtent& extent) {
    if (sources.empty()) throw ValueError("distance_grid: no source points");
    VariableGrid g = empty_grid(extent);
    const geom::KdTree tree(sources);
    parallel_for(static_cast<std::size_t>(g.nrows), [&](std::size_t r) {
        for (int c = 0; c < g.ncols; ++c)
            g.at(c, static_cast<int>(r)) = tree.nearest_distance(g.cell_center(c, static_cast<int>(r)));
    });
    return g;
}

double scott_bandwidth(const std::vector<geom::Point>& sources) {
    if (sources.empty()) throw ValueError("scott_bandwidth: no source points");
    const double n = static_cast<double>(sources.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : sources) {
        mx += p.x;
        my += p.y;
    }
    mx /= n;
    my /= n;
    double vx = 0.0, vy = 0.0;
    for (const auto& p : sources) {
        vx += (p.x - mx) * (p.x - mx);
        vy += (p.y - my) * (p.y - my);
    }
    const double pooled = std::sqrt(0.5 * (vx + vy) / std::max(1.0, n - 1.0));
    const double h = std::pow(n, -1.0 / 6.0) * pooled;
    return h > 0.0 ? h : 1.0;
}

VariableGrid kde_grid(const std::vector<geom::Point>& sources, const GridExtent& extent,
                      double bandwidth) {
    if (sources.empty()) throw ValueError("kde_grid: no source points");
    if (bandwidth <= 0.0) throw ValueError("kde_grid: bandwidth must be positive");
    VariableGrid g = empty_grid(extent);
    const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    const double norm = 1.0 / (2.0 * M_PI * bandwidth * bandwidth);
    // Kernels are truncated at 6 sigma; the mass beyond is ~1e-8.
    const double reach = 6.0 * bandwidth;
    parallel_for(static_cast<std::size_t>(g.nrows), [&](std::size_t row) {
        const int r = static_cast<int>(row);
        for (int c = 0; c < g.ncols; ++c) {
            const geom::Point cc = g.cell_center(c, r);
            double v = 0.0;
            for (const geom::Point& s : sources) {
                const double dx = cc.x - s.x;
                const double dy = cc.y - s.y;
                if (std::abs(dx) > reach || std::abs(dy) > reach) continue;
                v += std::exp(-(dx * dx + dy * dy) * inv2h2);
            }
            g.at(c, r) = v * norm;
        }
    });
    return g;
}

VariableGrid normalize(const VariableGrid& g) {
    g.validate();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : g.values) {
        if (g.is_nodata(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!std::isfinite(lo)) throw ValueError("normalize: grid has no data cells");
    VariableGrid out = g;
    const double span = hi - lo;
    for (double& v : out.values) {
        if (g.is_nodata(v)) continue;
        v = span > 0.0 ? (v - lo) / span : 0.0;
    }
    return out;
}

namespace {

int col_of(const VariableGrid& g, double x) {
    // Centroid exactly on a cell boundary goes to the smaller column.
    const double f = (x - g.origin.x) / g.cell_size;
    int c = static_cast<int>(std::ceil(f)) - 1;
    if (c < 0 && f >= 0.0) c = 0;
    return c;
}

int row_of(const VariableGrid& g, double y) {
    const double f = (y - g.origin.y) / g.cell_size;
    int from_bottom = static_cast<int>(std::ceil(f)) - 1;
    if (from_bottom < 0 && f >= 0.0) from_bottom = 0;
    return g.nrows - 1 - from_bottom;
}

} // namespace

double sample(const Parcel& parcel, const VariableGrid& g, SampleMode mode) {
    g.validate();
    if (mode == SampleMode::Centroid) {
        const int c = col_of(g, parcel.centroid.x);
        const int r = row_of(g, parcel.centroid.y);
        if (c < 0 || c >= g.ncols || r < 0 || r >= g.nrows)
            throw ValueError("sample: centroid of parcel " + parcel.id + " is outside the grid");
        const double v = g.at(c, r);
        if (g.is_nodata(v))
            throw ValueError("sample: centroid of parcel " + parcel.id + " hits a nodata cell");
        return v;
    }

    // Area-weighted mean over intersected cells.
    const geom::Box bb = parcel.geometry.bbox();
    const int c0 = std::max(0, static_cast<int>(std::floor((bb.minx - g.origin.x) / g.cell_size)));
    const int c1 = std::min(g.ncols - 1,
                            static_cast<int>(std::floor((bb.maxx - g.origin.x) / g.cell_size)));
    const int b0 = std::max(0, static_cast<int>(std::floor((bb.miny - g.origin.y) / g.cell_size)));
    const int b1 = std::min(g.nrows - 1,
                            static_cast<int>(std::floor((bb.maxy - g.origin.y) / g.cell_size)));
    double wsum = 0.0, vsum = 0.0;
    for (int cb = b0; cb <= b1; ++cb) {
        for (int c = c0; c <= c1; ++c) {
            const double x0 = g.origin.x + c * g.cell_size;
            const double y0 = g.origin.y + cb * g.cell_size;
            const double v = g.at(c, g.nrows - 1 - cb);
            if (g.is_nodata(v)) continue;
            geom::Ring cell{{x0, y0},
                            {x0 + g.cell_size, y0},
                            {x0 + g.cell_size, y0 + g.cell_size},
                            {x0, y0 + g.cell_size},
                            {x0, y0}};
            const double w =
                geom::intersection_area(parcel.geometry, geom::Polygon{std::move(cell), {}});
            if (w <= 0.0) continue;
            wsum += w;
            vsum += w * v;
        }
    }
    if (wsum <= 0.0)
        throw ValueError("sample: parcel " + parcel.id + " does not overlap the grid");
    return vsum / wsum;
}

FeatureMatrix assemble(const Landscape& ls,
                       const std::vector<std::pair<std::string, VariableGrid>>& grids,
                       SampleMode mode) {
    FeatureMatrix m;
    m.parcel_ids.reserve(ls.size());
    for (const Parcel& p : ls.parcels) m.parcel_ids.push_back(p.id);
    for (const auto& [name, _] : grids) m.variable_names.push_back(name);
    m.values.assign(m.rows() * m.cols(), 0.0);

    std::vector<VariableGrid> prepared;
    prepared.reserve(grids.size());
    for (const auto& [name, g] : grids) {
        try {
            prepared.push_back(normalize(g));
        } catch (const Error& e) {
            throw ValueError("assemble: grid '" + name + "': " + e.what());
        }
    }

    const std::size_t ncols = m.cols();
    parallel_for(ls.size(), [&](std::size_t i) {
        for (std::size_t c = 0; c < ncols; ++c) {
            try {
                m.values[i * ncols + c] = sample(ls.parcels[i], prepared[c], mode);
            } catch (const Error& e) {
                throw ValueError("assemble: grid '" + m.variable_names[c] + "': " + e.what());
            }
        }
    });
    return m;
}

} // namespace parcelca
