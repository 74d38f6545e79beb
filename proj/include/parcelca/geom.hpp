#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace parcelca::geom {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
    friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double distance(Point a, Point b);
/// Left-hand normal of a direction vector (90 degrees counter-clockwise).
inline Point perp(Point v) { return {-v.y, v.x}; }
Point normalized_dir(Point v);

struct Box {
    double minx = std::numeric_limits<double>::infinity();
    double miny = std::numeric_limits<double>::infinity();
    double maxx = -std::numeric_limits<double>::infinity();
    double maxy = -std::numeric_limits<double>::infinity();

    void expand(Point p);
    void expand(const Box& b);
    bool intersects(const Box& b) const {
        return minx <= b.maxx && b.minx <= maxx && miny <= b.maxy && b.miny <= maxy;
    }
    bool contains(Point p) const {
        return p.x >= minx && p.x <= maxx && p.y >= miny && p.y <= maxy;
    }
    Box inflated(double d) const { return {minx - d, miny - d, maxx + d, maxy + d}; }
    double width() const { return maxx - minx; }
    double height() const { return maxy - miny; }
};

/// Closed ring of vertices: front() == back(), at least 4 entries.
using Ring = std::vector<Point>;

double ring_signed_area(const Ring& r);
double ring_length(const Ring& r);
bool ring_is_simple(const Ring& r);
/// Even-odd test; points on the boundary count as inside.
bool point_in_ring(Point p, const Ring& r);
Box ring_bbox(const Ring& r);

/// Planar polygon: one counter-clockwise exterior ring plus clockwise holes.
/// Coordinates are projected meters; the toolkit never reprojects.
struct Polygon {
    Ring exterior;
    std::vector<Ring> holes;

    Box bbox() const;
    /// Closes near-closed rings and enforces canonical orientation in place.
    void normalize();
    /// Throws InvalidGeometryError on open/self-intersecting/degenerate rings,
    /// holes outside the exterior, or non-positive area.
    void validate() const;
};

Polygon make_polygon(Ring exterior, std::vector<Ring> holes = {});

double area(const Polygon& p);
double perimeter(const Polygon& p);
Point centroid(const Polygon& p);
bool contains(const Polygon& p, Point pt);

/// Area of the intersection of two polygons (holes respected). Exact up to
/// floating-point rounding; geometry of the overlap region is not produced.
double intersection_area(const Polygon& a, const Polygon& b);

/// Total length of boundary segments of `a` that run alongside the boundary
/// of `b`: within `tol` meters perpendicular offset and nearly parallel.
/// Point contacts and transversal crossings contribute nothing.
double shared_boundary_length(const Polygon& a, const Polygon& b, double tol);

/// Unit direction of the long axis of the minimum-area bounding rectangle.
Point mabr_long_axis(const Polygon& p);

/// Pieces of a polygon on each side of an oriented line. A side may hold
/// several pieces when the polygon is concave across the cut.
struct SplitResult {
    std::vector<Polygon> below; // signed distance < 0 side
    std::vector<Polygon> above; // signed distance > 0 side
};

SplitResult split_by_line(const Polygon& p, Point origin, Point dir);

/// One dichotomy step: cut through the centroid perpendicular to the long
/// axis of the minimum-area bounding rectangle. Retries with axis-parallel
/// cuts when a side comes out empty or a piece is a sliver
/// (< 1e-6 relative area); throws BisectFailedError if all attempts fail.
SplitResult bisect(const Polygon& p);

/// Static bounding-box tree (STR-packed) over parcel boxes and centroids.
/// Immutable after construction; concurrent queries are safe.
class SpatialIndex {
public:
    SpatialIndex() = default;
    SpatialIndex(std::vector<Box> boxes, std::vector<Point> centroids);

    std::size_t size() const { return boxes_.size(); }

    /// Indices whose stored box intersects `query` (candidates, not refined).
    std::vector<std::size_t> query_box(const Box& query) const;

    /// Exactly the indices whose centroid lies within Euclidean distance r
    /// of `center` (inclusive).
    std::vector<std::size_t> query_within_radius(Point center, double r) const;

private:
    struct Node {
        Box box;
        std::size_t begin = 0; // leaf: first item; internal: first child
        std::size_t count = 0;
        bool leaf = true;
    };
    std::vector<Box> boxes_;
    std::vector<Point> centroids_;
    std::vector<std::size_t> items_; // permutation of 0..n-1, grouped by leaf
    std::vector<Node> nodes_;
    std::size_t root_ = 0;
};

/// Kd-tree over points for nearest-neighbour queries.
class KdTree {
public:
    KdTree() = default;
    explicit KdTree(std::vector<Point> pts);

    bool empty() const { return pts_.empty(); }

    /// Index of the nearest point to q; `skip` excludes one index (pass
    /// npos to search all). Returns npos on empty tree.
    std::size_t nearest(Point q, std::size_t skip = npos) const;
    double nearest_distance(Point q, std::size_t skip = npos) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    struct Node {
        std::size_t begin = 0, count = 0; // leaf payload
        std::size_t left = 0, right = 0;
        double split = 0.0;
        int axis = -1; // -1 marks a leaf
    };
    void search(std::size_t node, Point q, std::size_t skip, std::size_t& best,
                double& best_d2) const;
    std::vector<Point> pts_;
    std::vector<std::size_t> idx_;
    std::vector<Node> nodes_;
    std::size_t root_ = 0;
};

} // namespace parcelca::geom
