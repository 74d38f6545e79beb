#pragma once

#include "parcelca/geom.hpp"
#include "parcelca/parcel.hpp"
#include "parcelca/rng.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace testutil {

using parcelca::geom::Point;
using parcelca::geom::Polygon;
using parcelca::geom::Ring;

inline Polygon rect(double x0, double y0, double x1, double y1) {
    return parcelca::geom::make_polygon(
        Ring{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}});
}

inline Polygon unit_square_at(double x, double y, double s = 1.0) {
    return rect(x, y, x + s, y + s);
}

/// Axis-aligned grid landscape: nx*ny square cells of side `s`, categories
/// assigned by the callback (col, row) -> category id.
inline parcelca::Landscape grid_landscape(int nx, int ny, double s,
                                          const std::vector<std::string>& cat_names,
                                          const std::function<int(int, int)>& category) {
    std::vector<parcelca::Parcel> parcels;
    parcels.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (int r = 0; r < ny; ++r) {
        for (int c = 0; c < nx; ++c) {
            const double x = c * s;
            const double y = r * s;
            parcels.push_back(parcelca::Parcel::make(
                "c" + std::to_string(r * nx + c), rect(x, y, x + s, y + s), category(c, r)));
        }
    }
    return parcelca::make_landscape(std::move(parcels), parcelca::CategoryTable(cat_names));
}

/// Random convex polygon: points on a randomly scaled ellipse, hulled by angle sort.
inline Polygon random_convex_polygon(parcelca::Rng& rng, double cx, double cy, double radius) {
    const int n = 5 + static_cast<int>(rng.next_below(8));
    std::vector<double> angles;
    for (int i = 0; i < n; ++i) angles.push_back(rng.next_double() * 2.0 * M_PI);
    std::sort(angles.begin(), angles.end());
    const double rx = radius * (0.5 + rng.next_double());
    const double ry = radius * (0.5 + rng.next_double());
    Ring ring;
    for (double a : angles) ring.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
    ring.push_back(ring.front());
    return parcelca::geom::make_polygon(std::move(ring));
}

/// Random concave star-shaped polygon around (cx, cy).
inline Polygon random_concave_polygon(parcelca::Rng& rng, double cx, double cy, double radius) {
    const int n = 8 + static_cast<int>(rng.next_below(8));
    Ring ring;
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * M_PI * i / n;
        const double r = radius * (0.35 + 0.65 * rng.next_double());
        ring.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
    }
    ring.push_back(ring.front());
    return parcelca::geom::make_polygon(std::move(ring));
}

} // namespace testutil
