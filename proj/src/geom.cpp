#include "parcelca/geom.hpp"

#include "parcelca/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace parcelca::geom {

namespace {

constexpr double kRelEps = 1e-9;
constexpr double kSliverRel = 1e-6;

double scale_of(const Box& b) {
    return std::max({std::abs(b.minx), std::abs(b.maxx), std::abs(b.miny), std::abs(b.maxy),
                     b.width(), b.height(), 1.0});
}

int sign_of(double v, double eps) { return v > eps ? 1 : (v < -eps ? -1 : 0); }

// Orientation of c relative to segment a->b.
double orient(Point a, Point b, Point c) { return cross(b - a, c - a); }

bool on_segment(Point a, Point b, Point p, double eps) {
    if (std::abs(orient(a, b, p)) > eps * std::max(1.0, distance(a, b))) return false;
    return p.x >= std::min(a.x, b.x) - eps && p.x <= std::max(a.x, b.x) + eps &&
           p.y >= std::min(a.y, b.y) - eps && p.y <= std::max(a.y, b.y) + eps;
}

// True when segments ab and cd intersect at more than a shared ring vertex.
bool segments_cross(Point a, Point b, Point c, Point d, double eps) {
    const double d1 = orient(c, d, a);
    const double d2 = orient(c, d, b);
    const double d3 = orient(a, b, c);
    const double d4 = orient(a, b, d);
    const double s = eps * std::max({distance(a, b), distance(c, d), 1.0});
    if (((d1 > s && d2 < -s) || (d1 < -s && d2 > s)) &&
        ((d3 > s && d4 < -s) || (d3 < -s && d4 > s)))
        return true;
    // Collinear or touching configurations.
    if (on_segment(c, d, a, eps) || on_segment(c, d, b, eps) || on_segment(a, b, c, eps) ||
        on_segment(a, b, d, eps))
        return true;
    return false;
}

} // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point normalized_dir(Point v) {
    const double n = std::hypot(v.x, v.y);
    if (n == 0.0) throw ValueError("cannot normalize a zero-length direction");
    return {v.x / n, v.y / n};
}

void Box::expand(Point p) {
    minx = std::min(minx, p.x);
    miny = std::min(miny, p.y);
    maxx = std::max(maxx, p.x);
    maxy = std::max(maxy, p.y);
}

void Box::expand(const Box& b) {
    minx = std::min(minx, b.minx);
    miny = std::min(miny, b.miny);
    maxx = std::max(maxx, b.maxx);
    maxy = std::max(maxy, b.maxy);
}

double ring_signed_area(const Ring& r) {
    double a = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) a += cross(r[i], r[i + 1]);
    return 0.5 * a;
}

double ring_length(const Ring& r) {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) len += distance(r[i], r[i + 1]);
    return len;
}

Box ring_bbox(const Ring& r) {
    Box b;
    for (const Point& p : r) b.expand(p);
    return b;
}

bool ring_is_simple(const Ring& r) {
    const std::size_t n = r.size() - 1; // edges
    if (n < 3) return false;
    const double eps = kRelEps * scale_of(ring_bbox(r));
    // Spikes: consecutive edges that double back on themselves.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const Point d1 = r[i + 1] - r[i];
        const Point d2 = r[j + 1] - r[j];
        const double l1 = std::hypot(d1.x, d1.y);
        const double l2 = std::hypot(d2.x, d2.y);
        if (l1 == 0.0 || l2 == 0.0) return false;
        if (std::abs(cross(d1, d2)) <= 1e-12 * l1 * l2 && dot(d1, d2) < 0.0) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_cross(r[i], r[i + 1], r[j], r[j + 1], eps)) return false;
        }
    }
    return true;
}

bool point_in_ring(Point p, const Ring& r) {
    const double eps = kRelEps * scale_of(ring_bbox(r));
    bool inside = false;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const Point a = r[i];
        const Point b = r[i + 1];
        if (on_segment(a, b, p, eps)) return true;
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

Box Polygon::bbox() const { return ring_bbox(exterior); }

namespace {

void close_ring(Ring& r, double eps) {
    if (r.size() >= 2 && distance(r.front(), r.back()) <= eps && !(r.front() == r.back()))
        r.back() = r.front();
    if (r.size() >= 3 && !(r.front() == r.back())) r.push_back(r.front());
}

void drop_duplicate_vertices(Ring& r, double eps) {
    Ring out;
    out.reserve(r.size());
    for (const Point& p : r) {
        if (out.empty() || distance(out.back(), p) > eps) out.push_back(p);
    }
    if (out.size() >= 2 && distance(out.front(), out.back()) <= eps) out.back() = out.front();
    if (out.size() >= 3 && !(out.front() == out.back())) out.push_back(out.front());
    r = std::move(out);
}

} // namespace

void Polygon::normalize() {
    const double eps = kRelEps * scale_of(ring_bbox(exterior));
    close_ring(exterior, eps);
    drop_duplicate_vertices(exterior, eps);
    if (ring_signed_area(exterior) < 0.0) std::reverse(exterior.begin(), exterior.end());
    for (Ring& h : holes) {
        close_ring(h, eps);
        drop_duplicate_vertices(h, eps);
        if (ring_signed_area(h) > 0.0) std::reverse(h.begin(), h.end());
    }
}

void Polygon::validate() const {
    auto check_ring = [](const Ring& r, const char* what) {
        if (r.size() < 4) throw InvalidGeometryError(std::string(what) + " ring has fewer than 4 points");
        if (!(r.front() == r.back()))
            throw InvalidGeometryError(std::string(what) + " ring is not closed");
        for (const Point& p : r)
            if (!std::isfinite(p.x) || !std::isfinite(p.y))
                throw InvalidGeometryError(std::string(what) + " ring has non-finite coordinates");
        if (!ring_is_simple(r))
            throw InvalidGeometryError(std::string(what) + " ring self-intersects");
    };
    check_ring(exterior, "exterior");
    const double ext_area = ring_signed_area(exterior);
    if (ext_area <= 0.0) throw InvalidGeometryError("exterior ring is degenerate or clockwise");
    double total = ext_area;
    for (const Ring& h : holes) {
        check_ring(h, "hole");
        const double ha = ring_signed_area(h);
        if (ha >= 0.0) throw InvalidGeometryError("hole ring is degenerate or counter-clockwise");
        for (std::size_t i = 0; i + 1 < h.size(); ++i)
            if (!point_in_ring(h[i], exterior))
                throw InvalidGeometryError("hole lies outside the exterior ring");
        total += ha;
    }
    if (total <= 0.0) throw InvalidGeometryError("polygon area is not positive");
}

Polygon make_polygon(Ring exterior, std::vector<Ring> holes) {
    Polygon p{std::move(exterior), std::move(holes)};
    p.normalize();
    p.validate();
    return p;
}

double area(const Polygon& p) {
    double a = ring_signed_area(p.exterior);
    for (const Ring& h : p.holes) a += ring_signed_area(h);
    if (a <= 0.0) throw InvalidGeometryError("degenerate polygon: non-positive area");
    return a;
}

double perimeter(const Polygon& p) {
    double len = ring_length(p.exterior);
    for (const Ring& h : p.holes) len += ring_length(h);
    return len;
}

Point centroid(const Polygon& p) {
    double a = 0.0;
    double cx = 0.0, cy = 0.0;
    auto accumulate = [&](const Ring& r) {
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
            const double w = cross(r[i], r[i + 1]);
            a += w;
            cx += (r[i].x + r[i + 1].x) * w;
            cy += (r[i].y + r[i + 1].y) * w;
        }
    };
    accumulate(p.exterior);
    for (const Ring& h : p.holes) accumulate(h);
    if (a <= 0.0) throw InvalidGeometryError("centroid of a zero-area polygon");
    return {cx / (3.0 * a), cy / (3.0 * a)};
}

bool contains(const Polygon& p, Point pt) {
    if (!point_in_ring(pt, p.exterior)) return false;
    for (const Ring& h : p.holes) {
        // Boundary of a hole still belongs to the polygon.
        if (point_in_ring(pt, h)) {
            bool on_hole_edge = false;
            const double eps = kRelEps * scale_of(ring_bbox(h));
            for (std::size_t i = 0; i + 1 < h.size() && !on_hole_edge; ++i)
                on_hole_edge = on_segment(h[i], h[i + 1], pt, eps);
            if (!on_hole_edge) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Intersection area: triangulate one polygon, clip the other against each
// triangle (Sutherland-Hodgman against a convex window is area-exact even for
// concave subjects), and combine ring contributions by inclusion-exclusion.
// ---------------------------------------------------------------------------

namespace {

std::vector<std::array<Point, 3>> triangulate_ring(Ring ring) {
    // Ear clipping over a CCW simple ring (closing vertex removed first).
    if (ring_signed_area(ring) < 0.0) std::reverse(ring.begin(), ring.end());
    ring.pop_back();
    const double eps = kRelEps * scale_of(ring_bbox(ring));
    std::vector<std::array<Point, 3>> tris;
    std::vector<std::size_t> v(ring.size());
    std::iota(v.begin(), v.end(), 0);

    auto point_in_tri = [&](Point p, Point a, Point b, Point c) {
        const double d1 = orient(a, b, p);
        const double d2 = orient(b, c, p);
        const double d3 = orient(c, a, p);
        return d1 >= -eps && d2 >= -eps && d3 >= -eps;
    };

    std::size_t guard = 0;
    while (v.size() > 3) {
        bool clipped = false;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Point a = ring[v[(i + v.size() - 1) % v.size()]];
            const Point b = ring[v[i]];
            const Point c = ring[v[(i + 1) % v.size()]];
            const double corner_eps = eps * (distance(a, b) + distance(b, c));
            if (orient(a, b, c) <= corner_eps) continue; // reflex or flat corner
            bool ear = true;
            for (std::size_t j = 0; j < v.size() && ear; ++j) {
                if (j == i || j == (i + v.size() - 1) % v.size() || j == (i + 1) % v.size())
                    continue;
                if (point_in_tri(ring[v[j]], a, b, c)) ear = false;
            }
            if (!ear) continue;
            tris.push_back({a, b, c});
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
            break;
        }
        if (!clipped) {
            if (++guard > ring.size())
                throw InvalidGeometryError("triangulation stalled on a degenerate ring");
            // Flat corners can block every ear test; drop the flattest vertex.
            std::size_t flattest = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < v.size(); ++i) {
                const Point a = ring[v[(i + v.size() - 1) % v.size()]];
                const Point b = ring[v[i]];
                const Point c = ring[v[(i + 1) % v.size()]];
                const double o = std::abs(orient(a, b, c));
                if (o < best) {
                    best = o;
                    flattest = i;
                }
            }
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(flattest));
        }
    }
    if (v.size() == 3) tris.push_back({ring[v[0]], ring[v[1]], ring[v[2]]});
    return tris;
}

// Clips a ring against the left half-plane of a->b, returning the clipped
// vertex loop (possibly with degenerate bridges; the signed area is exact).
std::vector<Point> clip_half_plane(const std::vector<Point>& pts, Point a, Point b) {
    std::vector<Point> out;
    out.reserve(pts.size() + 4);
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point cur = pts[i];
        const Point nxt = pts[(i + 1) % n];
        const double dc = orient(a, b, cur);
        const double dn = orient(a, b, nxt);
        if (dc >= 0.0) out.push_back(cur);
        if ((dc > 0.0 && dn < 0.0) || (dc < 0.0 && dn > 0.0)) {
            const double t = dc / (dc - dn);
            out.push_back(cur + (nxt - cur) * t);
        }
    }
    return out;
}

double clipped_area(const Ring& subject, const std::array<Point, 3>& tri) {
    std::vector<Point> pts(subject.begin(), subject.end() - 1);
    for (int e = 0; e < 3 && !pts.empty(); ++e)
        pts = clip_half_plane(pts, tri[static_cast<std::size_t>(e)],
                              tri[static_cast<std::size_t>((e + 1) % 3)]);
    if (pts.size() < 3) return 0.0;
    double a = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) a += cross(pts[i], pts[(i + 1) % pts.size()]);
    return 0.5 * a;
}

double ring_ring_intersection_area(const Ring& a, const Ring& b) {
    if (!ring_bbox(a).intersects(ring_bbox(b))) return 0.0;
    Ring subject = a;
    if (ring_signed_area(subject) < 0.0) std::reverse(subject.begin(), subject.end());
    double total = 0.0;
    for (const auto& tri : triangulate_ring(b)) total += clipped_area(subject, tri);
    return total;
}

} // namespace

double intersection_area(const Polygon& a, const Polygon& b) {
    if (!a.bbox().intersects(b.bbox())) return 0.0;
    auto rings_of = [](const Polygon& p) {
        std::vector<std::pair<const Ring*, double>> rs;
        rs.emplace_back(&p.exterior, 1.0);
        for (const Ring& h : p.holes) rs.emplace_back(&h, -1.0);
        return rs;
    };
    double total = 0.0;
    for (const auto& [ra, sa] : rings_of(a))
        for (const auto& [rb, sb] : rings_of(b))
            total += sa * sb * ring_ring_intersection_area(*ra, *rb);
    return std::max(0.0, total);
}

// ---------------------------------------------------------------------------
// Shared boundary length
// ---------------------------------------------------------------------------

namespace {

struct Edge {
    Point a, b;
    Point dir;    // unit
    double len;
    Box box;
};

std::vector<Edge> boundary_edges(const Polygon& p, double min_len) {
    std::vector<Edge> edges;
    auto add = [&](const Ring& r) {
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
            const double len = distance(r[i], r[i + 1]);
            if (len <= min_len) continue;
            Box box;
            box.expand(r[i]);
            box.expand(r[i + 1]);
            edges.push_back({r[i], r[i + 1], (r[i + 1] - r[i]) * (1.0 / len), len, box});
        }
    };
    add(p.exterior);
    for (const Ring& h : p.holes) add(h);
    return edges;
}

double merged_interval_length(std::vector<std::pair<double, double>>& iv) {
    if (iv.empty()) return 0.0;
    std::sort(iv.begin(), iv.end());
    double total = 0.0;
    double lo = iv[0].first, hi = iv[0].second;
    for (std::size_t i = 1; i < iv.size(); ++i) {
        if (iv[i].first <= hi) {
            hi = std::max(hi, iv[i].second);
        } else {
            total += hi - lo;
            lo = iv[i].first;
            hi = iv[i].second;
        }
    }
    return total + (hi - lo);
}

} // namespace

double shared_boundary_length(const Polygon& a, const Polygon& b, double tol) {
    if (tol < 0.0) throw ValueError("shared_boundary_length: negative tolerance");
    if (!a.bbox().inflated(tol).intersects(b.bbox())) return 0.0;
    // Edges count as running alongside when nearly parallel; transversal
    // contacts are excluded so corner touches measure exactly zero.
    constexpr double kMaxSin = 0.02;
    const double min_len = 0.0;
    const auto ea = boundary_edges(a, min_len);
    const auto eb = boundary_edges(b, min_len);
    double total = 0.0;
    std::vector<std::pair<double, double>> intervals;
    for (const Edge& e : ea) {
        intervals.clear();
        const Box query = e.box.inflated(tol);
        for (const Edge& f : eb) {
            if (!query.intersects(f.box)) continue;
            if (std::abs(cross(e.dir, f.dir)) > kMaxSin) continue;
            // Portion of f within tol of e's supporting line.
            const double da = cross(e.dir, f.a - e.a); // signed offsets
            const double db = cross(e.dir, f.b - e.a);
            double t0 = 0.0, t1 = 1.0;
            if (std::abs(db - da) > 1e-300) {
                // Clip [0,1] of f to |da + t(db-da)| <= tol.
                const double lo = (-tol - da) / (db - da);
                const double hi = (tol - da) / (db - da);
                t0 = std::max(0.0, std::min(lo, hi));
                t1 = std::min(1.0, std::max(lo, hi));
            } else if (std::abs(da) > tol) {
                continue;
            }
            if (t0 >= t1) continue;
            const Point fa = f.a + (f.b - f.a) * t0;
            const Point fb = f.a + (f.b - f.a) * t1;
            double s0 = dot(fa - e.a, e.dir);
            double s1 = dot(fb - e.a, e.dir);
            if (s0 > s1) std::swap(s0, s1);
            s0 = std::max(s0, 0.0);
            s1 = std::min(s1, e.len);
            if (s1 > s0) intervals.emplace_back(s0, s1);
        }
        total += merged_interval_length(intervals);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Minimum-area bounding rectangle via rotating calipers over the convex hull.
// ---------------------------------------------------------------------------

namespace {

std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(),
              [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end(), [](Point a, Point b) { return a == b; }),
              pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<Point> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

} // namespace

Point mabr_long_axis(const Polygon& p) {
    std::vector<Point> pts(p.exterior.begin(), p.exterior.end() - 1);
    const auto hull = convex_hull(std::move(pts));
    if (hull.size() < 2) throw InvalidGeometryError("degenerate polygon: no bounding rectangle");
    if (hull.size() == 2) return normalized_dir(hull[1] - hull[0]);

    double best_area = std::numeric_limits<double>::infinity();
    Point best_axis{1.0, 0.0};
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point e = hull[(i + 1) % hull.size()] - hull[i];
        const double len = std::hypot(e.x, e.y);
        if (len == 0.0) continue;
        const Point u{e.x / len, e.y / len};
        const Point v = perp(u);
        double umin = std::numeric_limits<double>::infinity(), umax = -umin;
        double vmin = umin, vmax = -umin;
        for (const Point& q : hull) {
            const double pu = dot(q, u);
            const double pv = dot(q, v);
            umin = std::min(umin, pu);
            umax = std::max(umax, pu);
            vmin = std::min(vmin, pv);
            vmax = std::max(vmax, pv);
        }
        const double w = umax - umin;
        const double h = vmax - vmin;
        const double rect_area = w * h;
        if (rect_area < best_area * (1.0 - 1e-12)) {
            best_area = rect_area;
            Point axis = (w >= h) ? u : v;
            // Canonical sign, and prefer the x-leaning direction on ties.
            if (std::abs(w - h) <= 1e-12 * std::max(w, h))
                axis = (std::abs(u.x) >= std::abs(v.x)) ? u : v;
            if (axis.x < 0.0 || (axis.x == 0.0 && axis.y < 0.0)) axis = axis * -1.0;
            best_axis = axis;
        }
    }
    return best_axis;
}

// ---------------------------------------------------------------------------
// Split by line. Boundary chains strictly on one side are stitched back
// together with the on-line intervals that bound each side's interior.
// ---------------------------------------------------------------------------

namespace {

struct Chain {
    std::vector<Point> pts; // first/last lie exactly on the line
    int side = 0;
    double tau_start = 0.0;
    double tau_end = 0.0;
};

struct DirectedEdge {
    std::vector<Point> pts;
    std::size_t from = 0, to = 0; // breakpoint node ids
    bool used = false;
};

std::size_t find_breakpoint(const std::vector<double>& taus, double tau, double eps) {
    auto it = std::lower_bound(taus.begin(), taus.end(), tau - eps);
    if (it == taus.end() || std::abs(*it - tau) > eps) {
        // Fall back to the closest entry; callers pass taus gathered from the
        // same node set, so a miss here means inconsistent snapping.
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < taus.size(); ++i) {
            const double d = std::abs(taus[i] - tau);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        return best;
    }
    return static_cast<std::size_t>(it - taus.begin());
}

std::vector<Polygon> assemble_side(const std::vector<Chain>& chains,
                                   const std::vector<Ring>& complete_rings,
                                   const std::vector<double>& taus,
                                   const std::vector<std::pair<double, double>>& intervals,
                                   Point origin, Point u, int side, double eps) {
    std::vector<DirectedEdge> edges;
    for (const Chain& c : chains) {
        if (c.side != side) continue;
        DirectedEdge e;
        e.pts = c.pts;
        e.from = find_breakpoint(taus, c.tau_start, eps);
        e.to = find_breakpoint(taus, c.tau_end, eps);
        edges.push_back(std::move(e));
    }
    for (const auto& [t0, t1] : intervals) {
        DirectedEdge e;
        // Interior must stay on the left while walking the boundary: the
        // `above` side walks +u, the `below` side walks -u.
        const double start = side > 0 ? t0 : t1;
        const double end = side > 0 ? t1 : t0;
        e.pts = {origin + u * start, origin + u * end};
        e.from = find_breakpoint(taus, start, eps);
        e.to = find_breakpoint(taus, end, eps);
        edges.push_back(std::move(e));
    }

    std::vector<std::vector<std::size_t>> outgoing(taus.size());
    for (std::size_t i = 0; i < edges.size(); ++i) outgoing[edges[i].from].push_back(i);

    auto out_dir = [&](const DirectedEdge& e) {
        for (std::size_t i = 1; i < e.pts.size(); ++i) {
            const Point d = e.pts[i] - e.pts[0];
            if (std::hypot(d.x, d.y) > 0.0) return normalized_dir(d);
        }
        return Point{1.0, 0.0};
    };
    auto in_dir = [&](const DirectedEdge& e) {
        const Point& last = e.pts.back();
        for (std::size_t i = e.pts.size() - 1; i-- > 0;) {
            const Point d = last - e.pts[i];
            if (std::hypot(d.x, d.y) > 0.0) return normalized_dir(d);
        }
        return Point{1.0, 0.0};
    };

    std::vector<Ring> cycles;
    for (std::size_t start = 0; start < edges.size(); ++start) {
        if (edges[start].used) continue;
        Ring ring;
        std::size_t cur = start;
        const std::size_t origin_node = edges[start].from;
        std::size_t guard = 0;
        while (true) {
            DirectedEdge& e = edges[cur];
            e.used = true;
            if (ring.empty()) {
                ring = e.pts;
            } else {
                ring.insert(ring.end(), e.pts.begin() + 1, e.pts.end());
            }
            const std::size_t node = e.to;
            if (node == origin_node) break;
            // Pick the unused outgoing edge that turns hardest toward the
            // interior: maximal CCW angle from the reversed incoming direction.
            const Point din = in_dir(e);
            const Point rev{-din.x, -din.y};
            const double ref = std::atan2(rev.y, rev.x);
            double best_angle = -1.0;
            std::size_t next = static_cast<std::size_t>(-1);
            for (std::size_t cand : outgoing[node]) {
                if (edges[cand].used) continue;
                const Point d = out_dir(edges[cand]);
                double ang = std::atan2(d.y, d.x) - ref;
                while (ang <= 0.0) ang += 2.0 * M_PI;
                while (ang > 2.0 * M_PI) ang -= 2.0 * M_PI;
                if (ang > best_angle) {
                    best_angle = ang;
                    next = cand;
                }
            }
            if (next == static_cast<std::size_t>(-1)) break; // open boundary; drop below
            cur = next;
            if (++guard > edges.size() + 4) break;
        }
        if (ring.size() >= 3) {
            if (!(ring.front() == ring.back())) ring.push_back(ring.front());
            drop_duplicate_vertices(ring, eps);
            if (ring.size() >= 4) cycles.push_back(std::move(ring));
        }
    }

    // Outer rings become pieces; negative cycles and untouched rings on this
    // side are holes assigned by containment.
    std::vector<Polygon> pieces;
    std::vector<Ring> hole_rings;
    for (Ring& r : cycles) {
        const double a = ring_signed_area(r);
        if (std::abs(a) <= eps * eps) continue;
        if (a > 0.0) {
            pieces.push_back(Polygon{std::move(r), {}});
        } else {
            hole_rings.push_back(std::move(r));
        }
    }
    for (const Ring& r : complete_rings) hole_rings.push_back(r);

    for (Ring& h : hole_rings) {
        double best_area = std::numeric_limits<double>::infinity();
        Polygon* owner = nullptr;
        for (Polygon& piece : pieces) {
            const double pa = ring_signed_area(piece.exterior);
            if (pa < best_area && point_in_ring(h.front(), piece.exterior)) {
                best_area = pa;
                owner = &piece;
            }
        }
        if (owner) {
            if (ring_signed_area(h) > 0.0) std::reverse(h.begin(), h.end());
            owner->holes.push_back(std::move(h));
        }
    }
    return pieces;
}

} // namespace

SplitResult split_by_line(const Polygon& p, Point origin, Point dir) {
    const Point u = normalized_dir(dir);
    const Point n = perp(u);
    const double eps = kRelEps * scale_of(p.bbox());

    struct Node {
        Point pt;
        int side;
        double tau;
    };

    bool any_pos = false, any_neg = false;
    std::vector<std::vector<Node>> ring_nodes;
    std::vector<const Ring*> all_rings;
    all_rings.push_back(&p.exterior);
    for (const Ring& h : p.holes) all_rings.push_back(&h);

    for (const Ring* rp : all_rings) {
        const Ring& r = *rp;
        std::vector<Node> nodes;
        nodes.reserve(r.size() + 8);
        std::vector<double> s(r.size());
        std::vector<int> side(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) {
            s[i] = dot(r[i] - origin, n);
            side[i] = sign_of(s[i], eps);
        }
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
            Node v{r[i], side[i], dot(r[i] - origin, u)};
            if (v.side == 0) v.pt = origin + u * v.tau; // snap onto the line
            nodes.push_back(v);
            if (side[i] > 0) any_pos = true;
            if (side[i] < 0) any_neg = true;
            if (side[i] * side[i + 1] < 0) {
                const double t = s[i] / (s[i] - s[i + 1]);
                const Point c = r[i] + (r[i + 1] - r[i]) * t;
                const double tau = dot(c - origin, u);
                nodes.push_back({origin + u * tau, 0, tau});
            }
        }
        ring_nodes.push_back(std::move(nodes));
    }

    SplitResult result;
    if (!any_neg) {
        result.above.push_back(p);
        return result;
    }
    if (!any_pos) {
        result.below.push_back(p);
        return result;
    }

    std::vector<Chain> chains;
    std::vector<Ring> complete_below, complete_above;
    std::vector<double> taus;

    for (std::size_t ri = 0; ri < ring_nodes.size(); ++ri) {
        const auto& nodes = ring_nodes[ri];
        bool has_on = false;
        int strict_side = 0;
        for (const Node& nd : nodes) {
            if (nd.side == 0) {
                has_on = true;
                taus.push_back(nd.tau);
            } else {
                strict_side = nd.side;
            }
        }
        if (!has_on) {
            (strict_side < 0 ? complete_below : complete_above).push_back(*all_rings[ri]);
            continue;
        }
        if (strict_side == 0) continue; // ring collapsed onto the line

        const std::size_t m = nodes.size();
        std::size_t first_on = 0;
        while (nodes[first_on].side != 0) ++first_on;
        Chain cur;
        cur.pts.push_back(nodes[first_on].pt);
        cur.tau_start = nodes[first_on].tau;
        for (std::size_t k = 1; k <= m; ++k) {
            const Node& nd = nodes[(first_on + k) % m];
            if (nd.side == 0) {
                if (cur.side != 0) {
                    cur.pts.push_back(nd.pt);
                    cur.tau_end = nd.tau;
                    chains.push_back(cur);
                }
                cur = Chain{};
                cur.pts.push_back(nd.pt);
                cur.tau_start = nd.tau;
            } else {
                cur.pts.push_back(nd.pt);
                cur.side = nd.side;
            }
        }
    }

    std::sort(taus.begin(), taus.end());
    std::vector<double> uniq;
    for (double t : taus)
        if (uniq.empty() || t - uniq.back() > eps) uniq.push_back(t);

    // On-line boundary intervals per side, decided by interior probes just
    // off the line at each gap midpoint.
    const double delta = 16.0 * eps;
    std::vector<std::pair<double, double>> below_iv, above_iv;
    for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
        const double mid = 0.5 * (uniq[i] + uniq[i + 1]);
        const Point below_probe = origin + u * mid - n * delta;
        const Point above_probe = origin + u * mid + n * delta;
        if (contains(p, below_probe)) below_iv.emplace_back(uniq[i], uniq[i + 1]);
        if (contains(p, above_probe)) above_iv.emplace_back(uniq[i], uniq[i + 1]);
    }

    result.below =
        assemble_side(chains, complete_below, uniq, below_iv, origin, u, -1, eps);
    result.above =
        assemble_side(chains, complete_above, uniq, above_iv, origin, u, +1, eps);
    for (Polygon& piece : result.below) piece.normalize();
    for (Polygon& piece : result.above) piece.normalize();
    return result;
}

SplitResult bisect(const Polygon& p) {
    const double full_area = area(p);
    const Point c = centroid(p);
    const Box bb = p.bbox();

    std::vector<Point> cut_dirs;
    cut_dirs.push_back(perp(mabr_long_axis(p)));
    // Axis-parallel fallbacks: cut across the longer bbox side first.
    if (bb.width() >= bb.height()) {
        cut_dirs.push_back({0.0, 1.0});
        cut_dirs.push_back({1.0, 0.0});
    } else {
        cut_dirs.push_back({1.0, 0.0});
        cut_dirs.push_back({0.0, 1.0});
    }

    for (const Point& dir : cut_dirs) {
        SplitResult r;
        try {
            r = split_by_line(p, c, dir);
        } catch (const Error&) {
            continue;
        }
        if (r.below.empty() || r.above.empty()) continue;
        double sum = 0.0;
        double min_piece = std::numeric_limits<double>::infinity();
        bool valid = true;
        for (const auto* side : {&r.below, &r.above}) {
            for (const Polygon& piece : *side) {
                double a = 0.0;
                try {
                    a = area(piece);
                } catch (const Error&) {
                    valid = false;
                    break;
                }
                sum += a;
                min_piece = std::min(min_piece, a);
            }
            if (!valid) break;
        }
        if (!valid) continue;
        if (std::abs(sum - full_area) > 1e-9 * full_area) continue;
        if (min_piece < kSliverRel * full_area) continue;
        return r;
    }
    throw BisectFailedError("bisect: no cut produced two usable pieces");
}

// ---------------------------------------------------------------------------
// SpatialIndex (STR-packed R-tree)
// ---------------------------------------------------------------------------

SpatialIndex::SpatialIndex(std::vector<Box> boxes, std::vector<Point> centroids)
    : boxes_(std::move(boxes)), centroids_(std::move(centroids)) {
    if (boxes_.size() != centroids_.size())
        throw ValueError("SpatialIndex: boxes and centroids must align");
    const std::size_t n = boxes_.size();
    items_.resize(n);
    std::iota(items_.begin(), items_.end(), std::size_t{0});
    if (n == 0) return;

    constexpr std::size_t kLeafCap = 16;
    auto center_x = [&](std::size_t i) { return 0.5 * (boxes_[i].minx + boxes_[i].maxx); };
    auto center_y = [&](std::size_t i) { return 0.5 * (boxes_[i].miny + boxes_[i].maxy); };

    // Sort-tile-recursive packing of the leaf level.
    const std::size_t nleaves = (n + kLeafCap - 1) / kLeafCap;
    const std::size_t nslices =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(nleaves))));
    const std::size_t per_slice = ((nleaves + nslices - 1) / nslices) * kLeafCap;
    std::sort(items_.begin(), items_.end(),
              [&](std::size_t a, std::size_t b) { return center_x(a) < center_x(b); });
    for (std::size_t s = 0; s * per_slice < n; ++s) {
        const std::size_t b = s * per_slice;
        const std::size_t e = std::min(n, b + per_slice);
        std::sort(items_.begin() + static_cast<std::ptrdiff_t>(b),
                  items_.begin() + static_cast<std::ptrdiff_t>(e),
                  [&](std::size_t x, std::size_t y) { return center_y(x) < center_y(y); });
    }

    std::vector<std::size_t> level; // node indices of the level being built
    for (std::size_t b = 0; b < n; b += kLeafCap) {
        Node leaf;
        leaf.begin = b;
        leaf.count = std::min(kLeafCap, n - b);
        leaf.leaf = true;
        for (std::size_t i = 0; i < leaf.count; ++i) leaf.box.expand(boxes_[items_[b + i]]);
        level.push_back(nodes_.size());
        nodes_.push_back(leaf);
    }
    while (level.size() > 1) {
        std::vector<std::size_t> next_level;
        for (std::size_t b = 0; b < level.size(); b += kLeafCap) {
            Node inner;
            inner.leaf = false;
            inner.count = std::min(kLeafCap, level.size() - b);
            // Children of one level are contiguous node indices.
            inner.begin = level[b];
            for (std::size_t i = 0; i < inner.count; ++i)
                inner.box.expand(nodes_[level[b + i]].box);
            next_level.push_back(nodes_.size());
            nodes_.push_back(inner);
        }
        level = std::move(next_level);
    }
    root_ = level.front();
}

std::vector<std::size_t> SpatialIndex::query_box(const Box& query) const {
    std::vector<std::size_t> out;
    if (nodes_.empty()) return out;
    std::vector<std::size_t> stack{root_};
    while (!stack.empty()) {
        const Node& nd = nodes_[stack.back()];
        stack.pop_back();
        if (!nd.box.intersects(query)) continue;
        if (nd.leaf) {
            for (std::size_t i = 0; i < nd.count; ++i) {
                const std::size_t item = items_[nd.begin + i];
                if (boxes_[item].intersects(query)) out.push_back(item);
            }
        } else {
            for (std::size_t i = 0; i < nd.count; ++i) stack.push_back(nd.begin + i);
        }
    }
    return out;
}

std::vector<std::size_t> SpatialIndex::query_within_radius(Point center, double r) const {
    if (r <= 0.0) throw ValueError("query_within_radius: radius must be positive");
    const Box q{center.x - r, center.y - r, center.x + r, center.y + r};
    std::vector<std::size_t> out;
    for (std::size_t item : query_box(q))
        if (distance(centroids_[item], center) <= r) out.push_back(item);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// KdTree
// ---------------------------------------------------------------------------

KdTree::KdTree(std::vector<Point> pts) : pts_(std::move(pts)) {
    const std::size_t n = pts_.size();
    idx_.resize(n);
    std::iota(idx_.begin(), idx_.end(), std::size_t{0});
    if (n == 0) return;

    struct Range {
        std::size_t begin, end, node;
    };
    constexpr std::size_t kLeaf = 8;
    // Build iteratively; node 0 is the root.
    nodes_.push_back({});
    std::vector<Range> stack{{0, n, 0}};
    while (!stack.empty()) {
        auto [b, e, ni] = stack.back();
        stack.pop_back();
        Node& nd = nodes_[ni];
        if (e - b <= kLeaf) {
            nd.axis = -1;
            nd.begin = b;
            nd.count = e - b;
            continue;
        }
        Box box;
        for (std::size_t i = b; i < e; ++i) box.expand(pts_[idx_[i]]);
        const int axis = box.width() >= box.height() ? 0 : 1;
        const std::size_t mid = (b + e) / 2;
        std::nth_element(idx_.begin() + static_cast<std::ptrdiff_t>(b),
                         idx_.begin() + static_cast<std::ptrdiff_t>(mid),
                         idx_.begin() + static_cast<std::ptrdiff_t>(e),
                         [&](std::size_t x, std::size_t y) {
                             return axis == 0 ? pts_[x].x < pts_[y].x : pts_[x].y < pts_[y].y;
                         });
        nd.axis = axis;
        nd.split = axis == 0 ? pts_[idx_[mid]].x : pts_[idx_[mid]].y;
        const std::size_t li = nodes_.size();
        nodes_.push_back({});
        const std::size_t riN = nodes_.size();
        nodes_.push_back({});
        nodes_[ni].left = li;
        nodes_[ni].right = riN;
        stack.push_back({b, mid, li});
        stack.push_back({mid, e, riN});
    }
    root_ = 0;
}

void KdTree::search(std::size_t node, Point q, std::size_t skip, std::size_t& best,
                    double& best_d2) const {
    const Node& nd = nodes_[node];
    if (nd.axis == -1) {
        for (std::size_t i = 0; i < nd.count; ++i) {
            const std::size_t item = idx_[nd.begin + i];
            if (item == skip) continue;
            const double dx = pts_[item].x - q.x;
            const double dy = pts_[item].y - q.y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2 || (d2 == best_d2 && item < best)) {
                best_d2 = d2;
                best = item;
            }
        }
        return;
    }
    const double qv = nd.axis == 0 ? q.x : q.y;
    const std::size_t near = qv < nd.split ? nd.left : nd.right;
    const std::size_t far = qv < nd.split ? nd.right : nd.left;
    search(near, q, skip, best, best_d2);
    const double plane = qv - nd.split;
    if (plane * plane <= best_d2) search(far, q, skip, best, best_d2);
}

std::size_t KdTree::nearest(Point q, std::size_t skip) const {
    if (pts_.empty()) return npos;
    std::size_t best = npos;
    double best_d2 = std::numeric_limits<double>::infinity();
    search(root_, q, skip, best, best_d2);
    return best;
}

double KdTree::nearest_distance(Point q, std::size_t skip) const {
    const std::size_t i = nearest(q, skip);
    if (i == npos) return std::numeric_limits<double>::quiet_NaN();
    return distance(pts_[i], q);
}

} // namespace parcelca::geom
