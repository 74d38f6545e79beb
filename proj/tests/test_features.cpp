#include "doctest.h"

#include "parcelca/error.hpp"
#include "parcelca/features.hpp"
#include "parcelca/rng.hpp"
#include "testutil.hpp"

#include <cmath>

using namespace parcelca;

namespace {

GridExtent square_extent(double size, double cell) {
    GridExtent e;
    e.origin = {0.0, 0.0};
    e.cell_size = cell;
    e.ncols = static_cast<int>(size / cell);
    e.nrows = static_cast<int>(size / cell);
    return e;
}

} // namespace

TEST_CASE("distance_grid: zero at the source cell, 3-4-5 scaling") {
    GridExtent e = square_extent(10.0, 1.0);
    // Source exactly on the center of cell (0, bottom row).
    const auto g = distance_grid({{0.5, 0.5}}, e);
    CHECK(g.at(0, g.nrows - 1) == doctest::Approx(0.0));
    // Cell centered at (3.5, 4.5): offset (3, 4) from source -> distance 5.
    CHECK(g.at(3, g.nrows - 1 - 4) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("distance_grid matches exhaustive scan") {
    Rng rng(5);
    std::vector<geom::Point> sources;
    for (int i = 0; i < 17; ++i)
        sources.push_back({rng.next_double() * 20.0, rng.next_double() * 20.0});
    GridExtent e = square_extent(20.0, 1.0);
    const auto g = distance_grid(sources, e);
    for (int r = 0; r < g.nrows; ++r) {
        for (int c = 0; c < g.ncols; ++c) {
            const geom::Point cc = g.cell_center(c, r);
            double best = 1e300;
            for (const auto& s : sources) best = std::min(best, geom::distance(cc, s));
            CHECK(g.at(c, r) == doctest::Approx(best).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(distance_grid({}, e), ValueError);
}

TEST_CASE("kde_grid: unimodal near source, bimodal for distant pair, mass ~ count") {
    GridExtent e = square_extent(100.0, 1.0);
    const auto g = kde_grid({{30.0, 50.0}}, e, 3.0);
    // Maximum is the cell nearest the source.
    double best = -1.0;
    int bc = -1, br = -1;
    for (int r = 0; r < g.nrows; ++r)
        for (int c = 0; c < g.ncols; ++c)
            if (g.at(c, r) > best) {
                best = g.at(c, r);
                bc = c;
                br = r;
            }
    const geom::Point peak = g.cell_center(bc, br);
    CHECK(std::abs(peak.x - 30.0) <= 0.5);
    CHECK(std::abs(peak.y - 50.0) <= 0.5);

    const auto two = kde_grid({{25.0, 50.0}, {75.0, 50.0}}, e, 3.0);
    // Integral ~ source count.
    double mass = 0.0;
    for (double v : two.values) mass += v;
    mass *= e.cell_size * e.cell_size;
    CHECK(mass == doctest::Approx(2.0).epsilon(0.05));
    // Two local maxima: value at each source beats the midpoint.
    const double at_a = two.at(25, two.nrows - 1 - 50);
    const double at_mid = two.at(50, two.nrows - 1 - 50);
    CHECK(at_a > 10.0 * at_mid);

    CHECK_THROWS_AS(kde_grid({{0, 0}}, e, 0.0), ValueError);
}

TEST_CASE("normalize: min-max, constant, idempotence at extremes") {
    VariableGrid g;
    g.origin = {0, 0};
    g.cell_size = 1.0;
    g.ncols = 3;
    g.nrows = 1;
    g.values = {2.0, 4.0, 6.0};
    const auto n = normalize(g);
    CHECK(n.values[0] == doctest::Approx(0.0));
    CHECK(n.values[1] == doctest::Approx(0.5));
    CHECK(n.values[2] == doctest::Approx(1.0));
    const auto again = normalize(n);
    CHECK(again.values == n.values);

    VariableGrid c = g;
    c.values = {7.0, 7.0, 7.0};
    const auto flat = normalize(c);
    for (double v : flat.values) CHECK(v == 0.0);

    VariableGrid all_nodata = g;
    all_nodata.values = {g.nodata, g.nodata, g.nodata};
    CHECK_THROWS_AS(normalize(all_nodata), ValueError);
}

TEST_CASE("sample: centroid mode, boundary tie, areal mean") {
    VariableGrid g;
    g.origin = {0, 0};
    g.cell_size = 1.0;
    g.ncols = 2;
    g.nrows = 1;
    g.values = {0.0, 1.0}; // left cell 0, right cell 1

    const Parcel left = Parcel::make("L", testutil::rect(0.1, 0.1, 0.9, 0.9), 0);
    CHECK(sample(left, g, SampleMode::Centroid) == 0.0);
    CHECK(sample(left, g, SampleMode::ArealMean) == 0.0);

    // Parcel spanning both cells equally: centroid exactly on x=1 boundary
    // goes to the smaller column; areal mean is 0.5.
    const Parcel span = Parcel::make("S", testutil::rect(0.5, 0.0, 1.5, 1.0), 0);
    CHECK(sample(span, g, SampleMode::Centroid) == 0.0);
    CHECK(sample(span, g, SampleMode::ArealMean) == doctest::Approx(0.5).epsilon(1e-9));

    const Parcel outside = Parcel::make("O", testutil::rect(5, 5, 6, 6), 0);
    CHECK_THROWS_WITH_AS(sample(outside, g, SampleMode::Centroid),
                         doctest::Contains("O"), ValueError);
}

TEST_CASE("assemble: values in [0,1], order stable, matches per-parcel sampling") {
    Landscape ls = testutil::grid_landscape(3, 3, 10.0, {"a"}, [](int, int) { return 0; });
    GridExtent e = square_extent(30.0, 10.0);
    const auto dist = distance_grid({{0.0, 0.0}}, e);
    VariableGrid flat = dist;
    for (double& v : flat.values) v = 42.0;

    const auto m = assemble(ls, {{"dist", dist}, {"flat", flat}});
    REQUIRE(m.rows() == 9);
    REQUIRE(m.cols() == 2);
    CHECK(m.variable_names[0] == "dist");
    const auto norm_dist = normalize(dist);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        CHECK(m.at(i, 0) >= 0.0);
        CHECK(m.at(i, 0) <= 1.0);
        CHECK(m.at(i, 1) == 0.0); // constant grid contributes nothing
        CHECK(m.at(i, 0) ==
              doctest::Approx(sample(ls.parcels[i], norm_dist, SampleMode::Centroid)));
    }
}
