#include "doctest.h"

#include "parcelca/error.hpp"
#include "parcelca/parcel.hpp"
#include "testutil.hpp"

using namespace parcelca;

TEST_CASE("category_areas sums per category") {
    std::vector<Parcel> ps;
    ps.push_back(Parcel::make("a", testutil::rect(0, 0, 10, 10), 0)); // 100 m2
    Landscape ls = make_landscape(std::move(ps), CategoryTable({"farmland", "construction"}));
    auto sums = category_areas(ls);
    CHECK(sums[0] == doctest::Approx(100.0));
    CHECK(sums[1] == 0.0);

    Landscape empty = make_landscape({}, CategoryTable({"a", "b"}));
    auto zeros = category_areas(empty);
    CHECK(zeros[0] == 0.0);
    CHECK(zeros[1] == 0.0);

    std::vector<Parcel> three;
    three.push_back(Parcel::make("p1", testutil::rect(0, 0, 1, 1), 0));
    three.push_back(Parcel::make("p2", testutil::rect(2, 0, 4, 1), 1));
    three.push_back(Parcel::make("p3", testutil::rect(5, 0, 8, 1), 1));
    Landscape mixed = make_landscape(std::move(three), CategoryTable({"a", "b"}));
    auto s = category_areas(mixed);
    CHECK(s[0] == doctest::Approx(1.0));
    CHECK(s[1] == doctest::Approx(5.0));
    CHECK(s[0] + s[1] == doctest::Approx(mixed.total_area).epsilon(1e-6));
}

TEST_CASE("landscape validation catches duplicates and bad categories") {
    std::vector<Parcel> ps;
    ps.push_back(Parcel::make("x", testutil::rect(0, 0, 1, 1), 0));
    ps.push_back(Parcel::make("x", testutil::rect(2, 0, 3, 1), 0));
    CHECK_THROWS_AS(make_landscape(std::move(ps), CategoryTable({"a"})), ValueError);

    std::vector<Parcel> bad;
    bad.push_back(Parcel::make("y", testutil::rect(0, 0, 1, 1), 5));
    CHECK_THROWS_AS(make_landscape(std::move(bad), CategoryTable({"a"})), ValueError);
}

TEST_CASE("parcel caches match recomputation") {
    const Parcel p = Parcel::make("p", testutil::rect(3, 4, 9, 8), 0);
    CHECK(p.area == doctest::Approx(geom::area(p.geometry)).epsilon(1e-9));
    CHECK(p.perimeter == doctest::Approx(geom::perimeter(p.geometry)).epsilon(1e-9));
    CHECK(p.centroid.x == doctest::Approx(6.0));
    CHECK(p.centroid.y == doctest::Approx(6.0));
}

TEST_CASE("category table rejects duplicate names") {
    CHECK_THROWS_AS(CategoryTable({"a", "a"}), ValueError);
    const CategoryTable t({"unused", "farmland", "construction"});
    CHECK(t.id_of("farmland") == 1);
    CHECK(t.id_of("bogus") == -1);
    CHECK(t.name_of(2) == "construction");
}
