#include "doctest.h"

#include "parcelca/error.hpp"
#include "parcelca/io.hpp"
#include "testutil.hpp"

#include <cmath>

using namespace parcelca;
namespace io = parcelca::io;

namespace {

const char* kTwoParcels = R"({
  "type": "FeatureCollection",
  "features": [
    {"type": "Feature",
     "geometry": {"type": "Polygon", "coordinates": [[[0,0],[10,0],[10,10],[0,10],[0,0]]]},
     "properties": {"id": "a", "luclass": "farmland"}},
    {"type": "Feature",
     "geometry": {"type": "Polygon", "coordinates": [[[10,0],[20,0],[20,10],[10,10],[10,0]]]},
     "properties": {"id": 7, "luclass": "construction", "parent_id": "orig"}}
  ]
})";

} // namespace

TEST_CASE("parcels: read resolves names, preserves ids, round-trips") {
    const auto ls = io::parse_parcels(kTwoParcels);
    REQUIRE(ls.size() == 2);
    CHECK(ls.parcels[0].id == "a");
    CHECK(ls.parcels[1].id == "7");
    CHECK(ls.parcels[1].id_numeric);
    CHECK(ls.parcels[1].parent_id == std::optional<std::string>("orig"));
    CHECK(ls.categories.id_of("farmland") == ls.parcels[0].category);
    CHECK(ls.parcels[0].area == doctest::Approx(100.0));

    const std::string text = io::serialize_parcels(ls);
    const auto back = io::parse_parcels(text);
    REQUIRE(back.size() == ls.size());
    for (std::size_t i = 0; i < ls.size(); ++i) {
        CHECK(back.parcels[i].id == ls.parcels[i].id);
        CHECK(back.parcels[i].category == ls.parcels[i].category);
        CHECK(back.parcels[i].parent_id == ls.parcels[i].parent_id);
        CHECK(back.parcels[i].area == doctest::Approx(ls.parcels[i].area).epsilon(1e-9));
        CHECK(std::abs(back.parcels[i].centroid.x - ls.parcels[i].centroid.x) <= 1e-9);
    }
    // Identical landscapes serialize to identical bytes.
    CHECK(io::serialize_parcels(back) == text);
}

TEST_CASE("parcels: multipolygon explodes with derived ids") {
    const char* text = R"({
      "type": "FeatureCollection",
      "features": [
        {"type": "Feature",
         "geometry": {"type": "MultiPolygon", "coordinates": [
            [[[0,0],[1,0],[1,1],[0,1],[0,0]]],
            [[[5,0],[6,0],[6,1],[5,1],[5,0]]]
         ]},
         "properties": {"id": "m", "luclass": 0}}
      ]
    })";
    const auto ls = io::parse_parcels(text);
    REQUIRE(ls.size() == 2);
    CHECK(ls.parcels[0].id == "m#0");
    CHECK(ls.parcels[1].id == "m#1");
}

TEST_CASE("parcels: duplicate ids and bad geometry are loud errors") {
    const char* dup = R"({
      "type": "FeatureCollection",
      "features": [
        {"type": "Feature", "geometry": {"type": "Polygon",
          "coordinates": [[[0,0],[1,0],[1,1],[0,1],[0,0]]]},
         "properties": {"id": "x", "luclass": 0}},
        {"type": "Feature", "geometry": {"type": "Polygon",
          "coordinates": [[[2,0],[3,0],[3,1],[2,1],[2,0]]]},
         "properties": {"id": "x", "luclass": 0}}
      ]
    })";
    CHECK_THROWS_WITH_AS(io::parse_parcels(dup), doctest::Contains("x"), IoError);

    const char* open_ring = R"({
      "type": "FeatureCollection",
      "features": [
        {"type": "Feature", "geometry": {"type": "Polygon",
          "coordinates": [[[0,0],[1,0],[1,1],[0,1]]]},
         "properties": {"id": "y", "luclass": 0}}
      ]
    })";
    CHECK_THROWS_WITH_AS(io::parse_parcels(open_ring), doctest::Contains("feature 0"), IoError);
}

TEST_CASE("parcels: unknown category against a declared table") {
    const CategoryTable table({"unused"});
    CHECK_THROWS_WITH_AS(io::parse_parcels(kTwoParcels, &table), doctest::Contains("farmland"),
                         IoError);
}

TEST_CASE("grid: round trip is bit exact, nodata preserved") {
    VariableGrid g;
    g.origin = {100.25, -3.5};
    g.cell_size = 30.0;
    g.ncols = 3;
    g.nrows = 2;
    g.nodata = -9999.0;
    g.values = {1.5, -9999.0, 0.1234567890123456, 2.0 / 3.0, 1e-17, 42.0};
    const std::string text = io::serialize_grid(g);
    const auto back = io::parse_grid(text);
    CHECK(back.ncols == 3);
    CHECK(back.nrows == 2);
    CHECK(back.cell_size == 30.0);
    CHECK(back.origin.x == g.origin.x);
    CHECK(back.values == g.values); // bit exact
    CHECK(back.is_nodata(back.values[1]));
    CHECK(io::serialize_grid(back) == text);
}

TEST_CASE("grid: header and count errors carry line information") {
    CHECK_THROWS_WITH_AS(io::parse_grid("NCOLS 2\nNROWS 2\n1 2 3 4\n"),
                         doctest::Contains("header"), IoError);
    const char* short_grid =
        "NCOLS 2\nNROWS 2\nXLLCORNER 0\nYLLCORNER 0\nCELLSIZE 30\n1 2 3\n";
    CHECK_THROWS_WITH_AS(io::parse_grid(short_grid), doctest::Contains("expected 4"), IoError);
}

TEST_CASE("features csv: round trip") {
    FeatureMatrix m;
    m.variable_names = {"dist", "dens"};
    m.parcel_ids = {"a", "b"};
    m.values = {0.25, 1.0, 0.0, 0.125};
    const std::string text = io::serialize_features(m);
    const auto back = io::parse_features(text);
    CHECK(back.variable_names == m.variable_names);
    CHECK(back.parcel_ids == m.parcel_ids);
    CHECK(back.values == m.values);
}

TEST_CASE("trace: serialize and parse round trip") {
    auto ls = testutil::grid_landscape(2, 2, 1.0, {"a", "b"}, [](int, int) { return 0; });
    SimulationTrace trace;
    trace.seed = 99;
    trace.demand_met = true;
    trace.shortfall = {0.0, 0.0};
    IterationRecord rec;
    rec.iteration = 0;
    rec.threshold = 0.8;
    rec.quota = 1.0;
    rec.converted_area = 1.0;
    rec.conversions.push_back({2, 0, 1, 0.5});
    rec.demand_remaining = {0.0, 0.0};
    trace.iterations.push_back(rec);

    const std::string text = io::serialize_trace(trace, ls);
    const auto back = io::parse_trace(text, ls);
    CHECK(back.seed == 99);
    REQUIRE(back.iterations.size() == 1);
    CHECK(back.iterations[0].conversions[0].cell == 2);
    CHECK(back.iterations[0].conversions[0].probability == 0.5);
}

TEST_CASE("toml: representative config parses") {
    const char* text = R"(
# run configuration
format_version = 1
seed = 42
categories = ["unused", "farmland", "construction"]

[inputs]
initial = "t0.geojson"
actual = "t1.geojson"

[subdivide]
enabled = true

[[grids]]
name = "road"
path = "road.asc"

[[grids]]
name = "poi"
path = "poi.asc"

[model]
kind = "rf"
[model.rf]
trees = 40

[simulation]
radius = 300.0
iterations = 5

[demand]
mode = "explicit"
[demand.explicit]
unused = 100.0
farmland = 200.0
construction = 36.5

[constraints]
forbidden = [["farmland", "construction"]]

[[constraints.zones]]
path = "eco.geojson"
overlap_fraction = 0.4
blocked = ["construction"]

[output]
dir = "results"
)";
    const auto cfg = io::parse_run_config(io::parse_toml(text));
    CHECK(cfg.seed == 42);
    CHECK(cfg.categories.size() == 3);
    CHECK(cfg.initial_path == "t0.geojson");
    CHECK(cfg.grids.size() == 2);
    CHECK(cfg.grids[1].first == "poi");
    CHECK(cfg.model_kind == "rf");
    CHECK(cfg.rf.trees == 40);
    CHECK(cfg.sim.neighborhood_radius == 300.0);
    CHECK(cfg.sim.iterations == 5);
    CHECK(cfg.sim.seed == 42);
    CHECK(cfg.demand.mode == io::DemandSpec::Mode::Explicit);
    REQUIRE(cfg.demand.explicit_targets.size() == 3);
    CHECK(cfg.demand.explicit_targets[0].first == "construction");
    CHECK(cfg.demand.explicit_targets[0].second == 36.5);
    REQUIRE(cfg.forbidden.size() == 1);
    CHECK(cfg.forbidden[0].first == "farmland");
    REQUIRE(cfg.zones.size() == 1);
    CHECK(cfg.zones[0].overlap_fraction == 0.4);
    CHECK(cfg.out_dir == "results");
}

TEST_CASE("toml: syntax and schema errors are precise") {
    CHECK_THROWS_WITH_AS(io::parse_toml("a = \n"), doctest::Contains("line 1"), IoError);
    CHECK_THROWS_WITH_AS(io::parse_toml("a = 1\na = 2\n"), doctest::Contains("duplicate"),
                         IoError);

    // Unknown keys rejected at every level.
    CHECK_THROWS_WITH_AS(io::parse_run_config(io::parse_toml("format_version = 1\nbogus = 3\n")),
                         doctest::Contains("bogus"), IoError);
    CHECK_THROWS_WITH_AS(
        io::parse_run_config(io::parse_toml("format_version = 1\n[model]\nknid = \"rf\"\n")),
        doctest::Contains("knid"), IoError);
    CHECK_THROWS_AS(io::parse_run_config(io::parse_toml("format_version = 2\n")), IoError);
}

TEST_CASE("config: json alternative with identical schema") {
    const char* text = R"({
      "format_version": 1,
      "seed": 7,
      "categories": ["a", "b"],
      "inputs": {"initial": "x.geojson"},
      "simulation": {"radius": 150.0}
    })";
    const auto cfg = io::parse_run_config(nlohmann::json::parse(text));
    CHECK(cfg.seed == 7);
    CHECK(cfg.sim.neighborhood_radius == 150.0);
}
