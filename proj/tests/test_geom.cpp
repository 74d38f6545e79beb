#include "doctest.h"

#include "parcelca/error.hpp"
#include "parcelca/geom.hpp"
#include "parcelca/rng.hpp"
#include "testutil.hpp"

#include <algorithm>
#include <cmath>

using namespace parcelca;
using namespace parcelca::geom;
using testutil::rect;

namespace {

Polygon square_with_hole() {
    // 2x2 square with a centered 1x1 hole.
    return make_polygon(Ring{{0, 0}, {2, 0}, {2, 2}, {0, 2}, {0, 0}},
                        {Ring{{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}, {0.5, 0.5}}});
}

Polygon l_shape() {
    // Union of unit squares at (0,0), (1,0) and (0,1).
    return make_polygon(Ring{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}, {0, 0}});
}

double total_area(const SplitResult& r) {
    double s = 0.0;
    for (const auto& p : r.below) s += area(p);
    for (const auto& p : r.above) s += area(p);
    return s;
}

} // namespace

TEST_CASE("area: unit cases and hole subtraction") {
    CHECK(area(rect(0, 0, 1, 1)) == doctest::Approx(1.0));
    const Polygon tri = make_polygon(Ring{{0, 0}, {1, 0}, {0, 1}, {0, 0}});
    CHECK(area(tri) == doctest::Approx(0.5));
    CHECK(area(square_with_hole()) == doctest::Approx(3.0));
}

TEST_CASE("perimeter: rings and holes both count") {
    CHECK(perimeter(rect(0, 0, 1, 1)) == doctest::Approx(4.0));
    CHECK(perimeter(rect(0, 0, 2, 1)) == doctest::Approx(6.0));
    CHECK(perimeter(square_with_hole()) == doctest::Approx(12.0));
}

TEST_CASE("centroid: symmetry, triangle, decomposition oracle") {
    const Point c1 = centroid(rect(0, 0, 1, 1));
    CHECK(c1.x == doctest::Approx(0.5));
    CHECK(c1.y == doctest::Approx(0.5));

    const Point c2 = centroid(make_polygon(Ring{{0, 0}, {3, 0}, {0, 3}, {0, 0}}));
    CHECK(c2.x == doctest::Approx(1.0));
    CHECK(c2.y == doctest::Approx(1.0));

    // Oracle: decompose the L into [0,1]x[0,2] (area 2, centroid (0.5, 1))
    // and [1,2]x[0,1] (area 1, centroid (1.5, 0.5)).
    const double ex = (2.0 * 0.5 + 1.0 * 1.5) / 3.0;
    const double ey = (2.0 * 1.0 + 1.0 * 0.5) / 3.0;
    const Point c3 = centroid(l_shape());
    CHECK(c3.x == doctest::Approx(ex).epsilon(1e-12));
    CHECK(c3.y == doctest::Approx(ey).epsilon(1e-12));
}

TEST_CASE("centroid of a convex polygon lies inside it") {
    Rng rng(77);
    for (int i = 0; i < 50; ++i) {
        const Polygon p = testutil::random_convex_polygon(rng, 10, -5, 4.0);
        CHECK(contains(p, centroid(p)));
    }
}

TEST_CASE("polygon validation rejects degenerate input") {
    CHECK_THROWS_AS(make_polygon(Ring{{0, 0}, {1, 0}, {2, 0}, {0, 0}}), InvalidGeometryError);
    // Bow-tie self-intersection.
    CHECK_THROWS_AS(make_polygon(Ring{{0, 0}, {1, 1}, {1, 0}, {0, 1}, {0, 0}}),
                    InvalidGeometryError);
}

TEST_CASE("bisect: 2x1 rectangle becomes two unit squares") {
    const SplitResult r = bisect(rect(0, 0, 2, 1));
    REQUIRE(r.below.size() == 1);
    REQUIRE(r.above.size() == 1);
    CHECK(area(r.below[0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(area(r.above[0]) == doctest::Approx(1.0).epsilon(1e-12));
    // Pieces are genuinely the two halves: bounding boxes split at x = 1.
    Box bb;
    for (const auto& p : r.below) bb.expand(p.bbox());
    for (const auto& p : r.above) bb.expand(p.bbox());
    CHECK(bb.minx == doctest::Approx(0.0));
    CHECK(bb.maxx == doctest::Approx(2.0));
}

TEST_CASE("bisect: unit square halves") {
    const SplitResult r = bisect(rect(0, 0, 1, 1));
    const double a0 = total_area(r);
    CHECK(a0 == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(r.below.size() == 1);
    REQUIRE(r.above.size() == 1);
    CHECK(area(r.below[0]) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("bisect: concave L conserves area") {
    const Polygon p = l_shape();
    const SplitResult r = bisect(p);
    CHECK(total_area(r) == doctest::Approx(area(p)).epsilon(1e-9));
    CHECK(!r.below.empty());
    CHECK(!r.above.empty());
}

TEST_CASE("bisect: area conservation on random polygons") {
    Rng rng(123);
    for (int i = 0; i < 60; ++i) {
        const Polygon p = (i % 2 == 0)
                              ? testutil::random_convex_polygon(rng, 100, 200, 30.0)
                              : testutil::random_concave_polygon(rng, -50, 30, 20.0);
        const SplitResult r = bisect(p);
        CHECK(total_area(r) == doctest::Approx(area(p)).epsilon(1e-9));
    }
}

TEST_CASE("split_by_line: hole-crossing cut conserves area and shape") {
    const Polygon p = square_with_hole();
    const SplitResult r = split_by_line(p, {1, 1}, {1, 0}); // horizontal through hole
    CHECK(total_area(r) == doctest::Approx(3.0).epsilon(1e-12));
    // Each half is a single C-shaped piece of area 1.5.
    REQUIRE(r.below.size() == 1);
    REQUIRE(r.above.size() == 1);
    CHECK(area(r.below[0]) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(perimeter(r.below[0]) == doctest::Approx(2 + 1 + 1 + 0.5 * 4 + 1).epsilon(1e-9));
}

TEST_CASE("split_by_line: untouched hole stays a hole") {
    const Polygon p = make_polygon(
        Ring{{0, 0}, {4, 0}, {4, 4}, {0, 4}, {0, 0}},
        {Ring{{1, 1}, {2, 1}, {2, 2}, {1, 2}, {1, 1}}});
    const SplitResult r = split_by_line(p, {0, 3}, {1, 0});
    REQUIRE(r.below.size() == 1);
    CHECK(r.below[0].holes.size() == 1);
    CHECK(area(r.below[0]) == doctest::Approx(4.0 * 3.0 - 1.0).epsilon(1e-12));
    REQUIRE(r.above.size() == 1);
    CHECK(r.above[0].holes.empty());
    CHECK(area(r.above[0]) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("split_by_line: U-shape splits into multiple pieces on one side") {
    // U open at the top; horizontal cut above the base leaves two prongs.
    const Polygon u = make_polygon(
        Ring{{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}, {0, 0}});
    const SplitResult r = split_by_line(u, {0, 2}, {1, 0});
    CHECK(r.below.size() == 1);
    CHECK(r.above.size() == 2);
    CHECK(total_area(r) == doctest::Approx(area(u)).epsilon(1e-12));
    for (const auto& prong : r.above) CHECK(area(prong) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("split_by_line: vertex exactly on the cut line") {
    const Polygon diamond = make_polygon(Ring{{1, 0}, {2, 1}, {1, 2}, {0, 1}, {1, 0}});
    const SplitResult r = split_by_line(diamond, {1, 1}, {1, 0});
    CHECK(total_area(r) == doctest::Approx(area(diamond)).epsilon(1e-12));
    REQUIRE(r.below.size() == 1);
    REQUIRE(r.above.size() == 1);
    CHECK(area(r.below[0]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mabr long axis of an axis-aligned rectangle") {
    const Point axis = mabr_long_axis(rect(0, 0, 2, 1));
    CHECK(std::abs(axis.x) == doctest::Approx(1.0));
    CHECK(std::abs(axis.y) == doctest::Approx(0.0));
    // Rotated rectangle: long axis along (1,1)/sqrt(2).
    const Polygon rot =
        make_polygon(Ring{{0, 0}, {2, 2}, {1.5, 2.5}, {-0.5, 0.5}, {0, 0}});
    const Point a2 = mabr_long_axis(rot);
    CHECK(std::abs(a2.x) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(std::abs(a2.y) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
}

TEST_CASE("shared_boundary_length: edge, corner, half overlap") {
    const Polygon a = rect(0, 0, 1, 1);
    const Polygon b = rect(1, 0, 2, 1);
    CHECK(shared_boundary_length(a, b, 0.01) == doctest::Approx(1.0).epsilon(1e-9));

    const Polygon c = rect(1, 1, 2, 2); // corner contact only
    CHECK(shared_boundary_length(a, c, 0.01) == 0.0);

    const Polygon d = rect(1, 0.5, 2, 1.5); // half of the x=1 edge shared
    CHECK(shared_boundary_length(a, d, 0.01) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("shared_boundary_length: symmetric and tolerant of small gaps") {
    const Polygon a = rect(0, 0, 1, 1);
    const Polygon b = rect(1.005, 0, 2, 1); // 5 mm digitization gap
    const double ab = shared_boundary_length(a, b, 0.01);
    const double ba = shared_boundary_length(b, a, 0.01);
    CHECK(ab == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(ab - ba) <= 1e-6 * std::max(ab, ba));

    const Polygon far = rect(1.05, 0, 2, 1); // beyond tolerance
    CHECK(shared_boundary_length(a, far, 0.01) == 0.0);
}

TEST_CASE("intersection_area: analytic fixtures") {
    const Polygon a = rect(0, 0, 2, 2);
    const Polygon b = rect(1, 1, 3, 3);
    CHECK(intersection_area(a, b) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(intersection_area(a, rect(5, 5, 6, 6)) == 0.0);
    CHECK(intersection_area(a, a) == doctest::Approx(4.0).epsilon(1e-12));

    // Hole subtracts: rect over the holed square's center misses the hole.
    const Polygon holed = square_with_hole();
    CHECK(intersection_area(holed, rect(0.5, 0.5, 1.5, 1.5)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(intersection_area(holed, rect(0, 0, 1, 1)) == doctest::Approx(0.75).epsilon(1e-12));

    // Concave subject: L-shape vs square covering its notch.
    CHECK(intersection_area(l_shape(), rect(1, 1, 2, 2)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(intersection_area(l_shape(), rect(0.5, 0.5, 1.5, 1.5)) ==
          doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("intersection_area: random cross-check against split identity") {
    // area(p) == area(p inter big box) for any box containing p.
    Rng rng(9);
    for (int i = 0; i < 20; ++i) {
        const Polygon p = testutil::random_concave_polygon(rng, 0, 0, 10.0);
        CHECK(intersection_area(p, rect(-20, -20, 20, 20)) ==
              doctest::Approx(area(p)).epsilon(1e-9));
    }
}

TEST_CASE("spatial index: radius query equals exhaustive scan") {
    Rng rng(42);
    std::vector<Box> boxes;
    std::vector<Point> centroids;
    for (int i = 0; i < 1000; ++i) {
        const Point c{rng.next_double() * 1000.0, rng.next_double() * 1000.0};
        Box b;
        b.expand(Point{c.x - 1, c.y - 1});
        b.expand(Point{c.x + 1, c.y + 1});
        boxes.push_back(b);
        centroids.push_back(c);
    }
    const SpatialIndex idx(boxes, centroids);
    for (int q = 0; q < 50; ++q) {
        const Point center{rng.next_double() * 1000.0, rng.next_double() * 1000.0};
        const double r = 10.0 + rng.next_double() * 200.0;
        auto got = idx.query_within_radius(center, r);
        std::vector<std::size_t> expect;
        for (std::size_t i = 0; i < centroids.size(); ++i)
            if (distance(centroids[i], center) <= r) expect.push_back(i);
        CHECK(got == expect);
    }
}

TEST_CASE("spatial index: grid neighbours at radius 150") {
    // Centroids on a 100 m grid; r = 150 catches the 4 axis neighbours and
    // the 4 diagonals at ~141.4 m.
    std::vector<Box> boxes;
    std::vector<Point> centroids;
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) {
            const Point p{c * 100.0, r * 100.0};
            Box b;
            b.expand(p);
            boxes.push_back(b);
            centroids.push_back(p);
        }
    const SpatialIndex idx(boxes, centroids);
    const auto got = idx.query_within_radius({200.0, 200.0}, 150.0);
    CHECK(got.size() == 9); // self plus 8 neighbours
    const auto none = idx.query_within_radius({200.0, 200.0}, 50.0);
    CHECK(none.size() == 1); // nothing but the center itself
}

TEST_CASE("kd-tree nearest matches brute force") {
    Rng rng(7);
    std::vector<Point> pts;
    for (int i = 0; i < 500; ++i)
        pts.push_back({rng.next_double() * 100.0, rng.next_double() * 100.0});
    const KdTree tree(pts);
    for (int q = 0; q < 200; ++q) {
        const Point query{rng.next_double() * 120.0 - 10.0, rng.next_double() * 120.0 - 10.0};
        double best = 1e300;
        for (const Point& p : pts) best = std::min(best, distance(p, query));
        CHECK(tree.nearest_distance(query) == doctest::Approx(best).epsilon(1e-12));
    }
}
