#include "doctest.h"

#include "parcelca/error.hpp"
#include "parcelca/rng.hpp"
#include "parcelca/vecli.hpp"
#include "testutil.hpp"
#include "vecli_oracle.hpp"

#include <algorithm>

using namespace parcelca;

TEST_CASE("topology_check: clean grid, overlap, bow-tie") {
    auto grid = testutil::grid_landscape(3, 3, 1.0, {"a"}, [](int, int) { return 0; });
    CHECK(topology_check(grid, 0.01).clean());

    std::vector<Parcel> over;
    over.push_back(Parcel::make("p", testutil::rect(0, 0, 1, 1), 0));
    over.push_back(Parcel::make("q", testutil::rect(0.5, 0, 1.5, 1), 0)); // 0.5x1 band
    auto ls = make_landscape(std::move(over), CategoryTable({"a"}));
    const auto rep = topology_check(ls, 0.01);
    REQUIRE(rep.overlaps.size() == 1);
    CHECK(rep.overlaps[0] == std::pair<std::string, std::string>{"p", "q"});

    // Bow-tie assembled by hand to bypass construction-time validation.
    Parcel bow;
    bow.id = "bow";
    bow.geometry = geom::Polygon{geom::Ring{{0, 0}, {3, 2}, {3, 0}, {0, 1}, {0, 0}}, {}};
    bow.category = 0;
    bow.area = 1.0;
    bow.perimeter = 1.0;
    bow.centroid = {1.5, 0.75};
    Landscape bad;
    bad.parcels.push_back(bow);
    bad.categories = CategoryTable({"a"});
    bad.refresh_total_area();
    const auto rep2 = topology_check(bad, 0.01);
    REQUIRE(rep2.self_intersections.size() == 1);
    CHECK(rep2.self_intersections[0] == "bow");
}

TEST_CASE("topology_check: sliver gap flagged") {
    std::vector<Parcel> ps;
    ps.push_back(Parcel::make("a", testutil::rect(0, 0, 1, 1), 0));
    ps.push_back(Parcel::make("b", testutil::rect(1.004, 0, 2, 1), 0)); // 4 mm gap
    auto ls = make_landscape(std::move(ps), CategoryTable({"x"}));
    const auto rep = topology_check(ls, 0.01);
    CHECK(rep.overlaps.empty());
    REQUIRE(rep.gaps.size() == 1);
}

TEST_CASE("merge_patches: edge adjacency merges, corner does not") {
    std::vector<Parcel> ps;
    ps.push_back(Parcel::make("a", testutil::rect(0, 0, 1, 1), 0));
    ps.push_back(Parcel::make("b", testutil::rect(1, 0, 2, 1), 0));
    auto ls = make_landscape(std::move(ps), CategoryTable({"x"}));
    auto patches = merge_patches(ls, 0.01);
    REQUIRE(patches.size() == 1);
    CHECK(patches[0].area == doctest::Approx(2.0));
    CHECK(patches[0].perimeter == doctest::Approx(6.0));
    CHECK(patches[0].centroid.x == doctest::Approx(1.0));

    std::vector<Parcel> diff;
    diff.push_back(Parcel::make("a", testutil::rect(0, 0, 1, 1), 0));
    diff.push_back(Parcel::make("b", testutil::rect(1, 0, 2, 1), 1));
    auto ls2 = make_landscape(std::move(diff), CategoryTable({"x", "y"}));
    CHECK(merge_patches(ls2, 0.01).size() == 2);

    std::vector<Parcel> corner;
    corner.push_back(Parcel::make("a", testutil::rect(0, 0, 1, 1), 0));
    corner.push_back(Parcel::make("b", testutil::rect(1, 1, 2, 2), 0));
    auto ls3 = make_landscape(std::move(corner), CategoryTable({"x"}));
    CHECK(merge_patches(ls3, 0.01).size() == 2);
}

TEST_CASE("merge_patches: partition covers every parcel exactly once") {
    Rng rng(11);
    auto ls = testutil::grid_landscape(12, 9, 1.0, {"a", "b", "c"}, [&](int, int) {
        return static_cast<int>(rng.next_below(3));
    });
    const auto patches = merge_patches(ls, 0.01);
    std::vector<int> seen(ls.size(), 0);
    for (const auto& p : patches)
        for (std::size_t m : p.members) seen[m] += 1;
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
}

TEST_CASE("merge_patches: order independence") {
    Rng rng(13);
    std::vector<int> cats(48);
    for (auto& c : cats) c = static_cast<int>(rng.next_below(2));
    auto ls = testutil::grid_landscape(8, 6, 1.0, {"a", "b"},
                                       [&](int c, int r) { return cats[r * 8 + c]; });
    const auto m1 = metrics(merge_patches(ls, 0.01), ls.total_area);

    // Same landscape, parcels shuffled.
    std::vector<Parcel> shuffled = ls.parcels;
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng.next_below(i)]);
    auto ls2 = make_landscape(std::move(shuffled), ls.categories);
    const auto m2 = metrics(merge_patches(ls2, 0.01), ls2.total_area);

    CHECK(m1.np == m2.np);
    CHECK(m1.lpi == doctest::Approx(m2.lpi).epsilon(1e-12));
    CHECK(m1.para == doctest::Approx(m2.para).epsilon(1e-12));
    REQUIRE(m1.enn.has_value() == m2.enn.has_value());
    if (m1.enn) CHECK(*m1.enn == doctest::Approx(*m2.enn).epsilon(1e-12));
}

TEST_CASE("filter_small: rules") {
    std::vector<Patch> patches(4);
    patches[0].area = 1.0;
    patches[1].area = 1.0;
    patches[2].area = 1.0;
    patches[3].area = 100.0;

    CHECK(filter_small(patches, FilterRule::none()).size() == 4);
    CHECK(filter_small(patches, FilterRule::absolute(0.0)).size() == 4);
    // sigma ~= 42.88, 3 sigma ~= 128.6: the literal rule removes everything.
    CHECK(filter_small(patches, FilterRule::below_k_sigma(3.0)).empty());
    CHECK(filter_small(patches, FilterRule::absolute(50.0)).size() == 1);
}

TEST_CASE("metrics: single patch and hand-computed fixtures") {
    std::vector<Patch> one(1);
    one[0].category = 0;
    one[0].area = 8.0;
    one[0].perimeter = 12.0;
    one[0].centroid = {1, 1};
    const auto r = metrics(one, 8.0);
    CHECK(r.np == 1);
    CHECK(r.lpi == doctest::Approx(1.0));
    CHECK(!r.enn.has_value());
    CHECK(r.para == doctest::Approx(12.0 / 8.0));

    // ENN fixture: same-category centroids at x = 0, 3, 7.
    std::vector<Patch> three(3);
    for (std::size_t i = 0; i < 3; ++i) {
        three[i].category = 0;
        three[i].area = 1.0;
        three[i].perimeter = 4.0;
    }
    three[0].centroid = {0, 0};
    three[1].centroid = {3, 0};
    three[2].centroid = {7, 0};
    const auto r3 = metrics(three, 100.0);
    REQUIRE(r3.enn.has_value());
    CHECK(*r3.enn == doctest::Approx(10.0 / 3.0).epsilon(1e-12));

    // PARA fixture: unit square and a 2x2 square.
    std::vector<Patch> two(2);
    two[0] = {0, {}, 1.0, 4.0, {0, 0}};
    two[1] = {0, {}, 4.0, 8.0, {5, 0}};
    CHECK(metrics(two, 100.0).para == doctest::Approx(3.0));
}

TEST_CASE("li_similarity: identity and published index rows") {
    const auto actual18 = report_from_values(13502, 0.419, 52.532, 0.112);
    CHECK(li_similarity(actual18, actual18) == doctest::Approx(1.0));

    const auto rf18 = report_from_values(11023, 0.418, 48.029, 0.085);
    CHECK(li_similarity(rf18, actual18) == doctest::Approx(0.873).epsilon(0.0025));
    const auto nn18 = report_from_values(11161, 0.426, 47.081, 0.085);
    CHECK(li_similarity(nn18, actual18) == doctest::Approx(0.869).epsilon(0.0025));
}

TEST_CASE("li_similarity: zero actual skips the index with a note") {
    auto sim = report_from_values(10, 0.5, std::nullopt, 0.1);
    auto act = report_from_values(10, 0.5, std::nullopt, 0.0); // PARA zero
    std::vector<std::string> skipped;
    const double a = li_similarity(sim, act, &skipped);
    CHECK(a == doctest::Approx(1.0));
    REQUIRE(skipped.size() == 1);
    CHECK(skipped[0] == "PARA");
}

TEST_CASE("metrics match the grid oracle on random landscapes") {
    Rng rng(99);
    for (int trial = 0; trial < 6; ++trial) {
        const int nx = 6 + static_cast<int>(rng.next_below(9));
        const int ny = 5 + static_cast<int>(rng.next_below(8));
        const int ncat = 2 + static_cast<int>(rng.next_below(3));
        std::vector<int> cats(static_cast<std::size_t>(nx) * ny);
        for (auto& c : cats) c = static_cast<int>(rng.next_below(ncat));
        std::vector<std::string> names;
        for (int k = 0; k < ncat; ++k) names.push_back("c" + std::to_string(k));
        auto ls = testutil::grid_landscape(nx, ny, 1.0, names,
                                           [&](int c, int r) { return cats[r * nx + c]; });
        const auto got = metrics(merge_patches(ls, 0.01), ls.total_area);
        const auto want = testutil::grid_oracle(nx, ny, 1.0, cats);
        CHECK(got.np == want.np);
        CHECK(got.lpi == doctest::Approx(want.lpi).epsilon(1e-12));
        CHECK(got.para == doctest::Approx(want.para).epsilon(1e-12));
        REQUIRE(got.enn.has_value() == want.enn.has_value());
        if (got.enn) CHECK(*got.enn == doctest::Approx(*want.enn).epsilon(1e-9));
    }
}
