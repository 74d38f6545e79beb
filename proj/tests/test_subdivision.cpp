#include "doctest.h"

#include "parcelca/rng.hpp"
#include "parcelca/subdivision.hpp"
#include "testutil.hpp"

#include <map>

using namespace parcelca;

namespace {

Landscape single(const geom::Polygon& poly, double /*unused*/ = 0.0) {
    std::vector<Parcel> ps;
    ps.push_back(Parcel::make("p0", poly, 0));
    return make_landscape(std::move(ps), CategoryTable({"only"}));
}

} // namespace

TEST_CASE("subdivide: parcel exactly at target passes through") {
    Landscape ls = single(testutil::rect(0, 0, 2, 2)); // area 4
    SubdivisionConfig cfg;
    cfg.target_area = 4.0;
    const auto r = subdivide(ls, cfg);
    REQUIRE(r.landscape.size() == 1);
    CHECK(r.landscape.parcels[0].id == "p0");
    CHECK(!r.landscape.parcels[0].parent_id.has_value());
}

TEST_CASE("subdivide: 2x2 square at target 1 gives four unit cells") {
    Landscape ls = single(testutil::rect(0, 0, 2, 2));
    SubdivisionConfig cfg;
    cfg.target_area = 1.0;
    const auto r = subdivide(ls, cfg);
    REQUIRE(r.landscape.size() == 4);
    for (const Parcel& c : r.landscape.parcels) {
        CHECK(c.area == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(c.parent_id == std::optional<std::string>("p0"));
        CHECK(c.category == 0);
    }
    CHECK(r.landscape.total_area == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("subdivide: empty landscape stays empty") {
    Landscape empty = make_landscape({}, CategoryTable({"a"}));
    const auto r = subdivide(empty, {});
    CHECK(r.landscape.size() == 0);
}

TEST_CASE("subdivide: default target is the mean input area") {
    // Two parcels of area 4 and 1; mean 2.5, so only the big one splits.
    std::vector<Parcel> ps;
    ps.push_back(Parcel::make("big", testutil::rect(0, 0, 2, 2), 0));
    ps.push_back(Parcel::make("small", testutil::rect(5, 0, 6, 1), 0));
    Landscape ls = make_landscape(std::move(ps), CategoryTable({"only"}));
    const auto r = subdivide(ls, {});
    CHECK(r.landscape.size() == 3);
    bool small_untouched = false;
    for (const Parcel& p : r.landscape.parcels)
        if (p.id == "small") small_untouched = true;
    CHECK(small_untouched);
}

TEST_CASE("subdivide: per-parent area conservation and bound") {
    Rng rng(2024);
    std::vector<Parcel> ps;
    for (int i = 0; i < 12; ++i) {
        const double cx = (i % 4) * 50.0;
        const double cy = (i / 4) * 50.0;
        const auto poly = (i % 3 == 0)
                              ? testutil::random_concave_polygon(rng, cx, cy, 15.0)
                              : testutil::random_convex_polygon(rng, cx, cy, 12.0);
        ps.push_back(Parcel::make("p" + std::to_string(i), poly, i % 2));
    }
    Landscape ls = make_landscape(std::move(ps), CategoryTable({"a", "b"}));
    SubdivisionConfig cfg;
    cfg.target_area = 40.0;
    const auto r = subdivide(ls, cfg);
    CHECK(r.failed_ids.empty());

    std::map<std::string, double> child_area_by_parent;
    for (const Parcel& c : r.landscape.parcels) {
        CHECK(c.area <= 40.0 * (1.0 + 1e-9));
        child_area_by_parent[c.parent_id.value_or(c.id)] += c.area;
    }
    for (const Parcel& parent : ls.parcels) {
        const double sum = child_area_by_parent.at(parent.id);
        CHECK(sum == doctest::Approx(parent.area).epsilon(1e-6));
    }
}

TEST_CASE("subdivide: idempotent and deterministic") {
    Landscape ls = single(testutil::rect(0, 0, 8, 2));
    SubdivisionConfig cfg;
    cfg.target_area = 3.0;
    const auto once = subdivide(ls, cfg);
    const auto again = subdivide(once.landscape, cfg);
    REQUIRE(once.landscape.size() == again.landscape.size());
    for (std::size_t i = 0; i < once.landscape.size(); ++i) {
        CHECK(once.landscape.parcels[i].id == again.landscape.parcels[i].id);
        CHECK(once.landscape.parcels[i].area ==
              doctest::Approx(again.landscape.parcels[i].area).epsilon(1e-12));
    }

    const auto rerun = subdivide(ls, cfg);
    REQUIRE(rerun.landscape.size() == once.landscape.size());
    for (std::size_t i = 0; i < once.landscape.size(); ++i)
        CHECK(once.landscape.parcels[i].id == rerun.landscape.parcels[i].id);
}
