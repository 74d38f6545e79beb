#pragma once

#include "parcelca/assess.hpp"
#include "parcelca/demand.hpp"
#include "parcelca/engine.hpp"
#include "parcelca/features.hpp"
#include "parcelca/models.hpp"
#include "parcelca/parcel.hpp"
#include "parcelca/vecli.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace parcelca::io {

/// Shortest round-trip decimal form; writers use it so identical values
/// always serialize to identical bytes.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// FNV-1a 64-bit over raw bytes, hex-encoded. Used for run manifests.
std::string fnv1a64_hex(const std::string& bytes);

// --- Parcel maps (GeoJSON syntax, projected planar coordinates) -----------

/// Reads a feature collection of Polygon/MultiPolygon features. MultiPolygon
/// parts explode into parcels with derived ids "id#0", "id#1", ... A given
/// category table resolves `luclass` names or numeric ids; without one the
/// table is inferred from the file.
Landscape parse_parcels(const std::string& text, const CategoryTable* categories = nullptr);
Landscape read_parcels(const std::string& path, const CategoryTable* categories = nullptr);

std::string serialize_parcels(const Landscape& ls);
void write_parcels(const Landscape& ls, const std::string& path);

// --- Variable grids (ESRI ASCII) -------------------------------------------

VariableGrid parse_grid(const std::string& text);
VariableGrid read_grid(const std::string& path);
std::string serialize_grid(const VariableGrid& g);
void write_grid(const VariableGrid& g, const std::string& path);

// --- Feature matrices (CSV) -------------------------------------------------

std::string serialize_features(const FeatureMatrix& m);
FeatureMatrix parse_features(const std::string& text);

// --- Simulation traces (JSON lines) ----------------------------------------

/// One header object, then one object per iteration. Conversions reference
/// parcels by id.
std::string serialize_trace(const SimulationTrace& trace, const Landscape& cells);
SimulationTrace parse_trace(const std::string& text, const Landscape& cells);

// --- Reports -----------------------------------------------------------------

nlohmann::json accuracy_to_json(const AccuracyReport& r);
std::string accuracy_csv(const AccuracyReport& r);

nlohmann::json landscape_report_to_json(const LandscapeReport& r,
                                        const CategoryTable* categories = nullptr);
std::string landscape_report_csv(const LandscapeReport& r);

nlohmann::json crosstab_to_json(const CrossTab& ct, const CategoryTable& categories);
std::string crosstab_csv(const CrossTab& ct, const CategoryTable& categories);
nlohmann::json demand_to_json(const Demand& d, const CategoryTable& categories);

std::string sweep_csv(const SweepResult& sweep);

// --- TOML subset -------------------------------------------------------------

/// Parses the TOML subset used by run configs (tables, arrays of tables,
/// scalars, arrays, inline tables, comments) into a JSON document.
nlohmann::json parse_toml(const std::string& text);

// --- Run configuration --------------------------------------------------------

struct ZoneSpec {
    std::string path;
    double overlap_fraction = 0.5;
    std::vector<std::string> blocked; // category names; empty blocks all
};

struct MarkovSpec {
    std::string t0_path;
    std::string t1_path;
    double period_years = 0.0;
    int steps = 0; // takes precedence when > 0
    int base_year = 0;
    int target_year = 0;
};

struct DemandSpec {
    enum class Mode { CurrentAreas, Explicit, Markov };
    Mode mode = Mode::CurrentAreas;
    std::vector<std::pair<std::string, double>> explicit_targets; // name -> m^2
    MarkovSpec markov;
};

struct RunConfig {
    std::uint64_t seed = 0;
    int workers = 0;
    std::vector<std::string> categories;

    std::string initial_path;
    std::string actual_path; // optional

    bool subdivide_enabled = true;
    double subdivide_target_area = 0.0; // 0 = mean input parcel area
    int subdivide_max_depth = 32;

    std::vector<std::pair<std::string, std::string>> grids; // name -> path
    SampleMode sample_mode = SampleMode::Centroid;

    std::string model_kind = "rf";
    std::string model_path; // load a trained model instead of training
    double split_fraction = 0.7;
    bool balanced = false;
    LrHyper lr;
    MlpHyper mlp;
    RfHyper rf;

    SimConfig sim; // seed is filled from the top-level seed

    DemandSpec demand;

    std::vector<ZoneSpec> zones;
    std::vector<std::pair<std::string, std::string>> forbidden; // category names

    std::string out_dir = "out";
    double adjacency_tol = 0.01;
};

/// Strict parse: unknown keys anywhere are an error.
RunConfig parse_run_config(const nlohmann::json& doc);
/// Loads TOML (default) or JSON (path ending in .json or content starting
/// with '{').
RunConfig load_run_config(const std::string& path);

} // namespace parcelca::io
