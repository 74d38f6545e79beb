#pragma once

#include "parcelca/parcel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace parcelca {

/// Maximal region of same-category parcels connected through shared
/// boundaries; the unit all landscape indices are computed over.
struct Patch {
    int category = 0;
    std::vector<std::size_t> members; // indices into the source landscape
    double area = 0.0;                // sum of member areas
    double perimeter = 0.0;           // outer boundary of the merged region
    geom::Point centroid;             // area-weighted mean of member centroids
};

struct CategoryIndices {
    int np = 0;
    double lpi = 0.0;
    std::optional<double> enn;
    double para = 0.0;
};

struct LandscapeReport {
    int np = 0;
    double lpi = 0.0;          // fraction of total landscape area in [0,1]
    std::optional<double> enn; // absent when no category has 2+ patches
    double para = 0.0;
    std::vector<CategoryIndices> per_category;
    double adjacency_tol = 0.0;
    std::string filter = "none";
};

struct TopologyReport {
    std::vector<std::string> self_intersections;                    // parcel ids
    std::vector<std::pair<std::string, std::string>> overlaps;      // id pairs
    std::vector<std::pair<std::string, std::string>> gaps;          // id pairs
    bool clean() const {
        return self_intersections.empty() && overlaps.empty() && gaps.empty();
    }
};

/// Flags self-intersecting rings, pairwise overlaps with intersection area
/// above tol^2, and sliver gaps: boundaries that run within tol of each other
/// without touching.
TopologyReport topology_check(const Landscape& ls, double tol);

/// Connected components of the same-category adjacency graph (shared
/// boundary longer than adjacency_tol). Patch perimeter subtracts internal
/// boundaries twice; the result is order-independent.
std::vector<Patch> merge_patches(const Landscape& ls, double adjacency_tol = 0.01);

struct FilterRule {
    enum class Kind { None, BelowKSigma, Absolute };
    Kind kind = Kind::None;
    double value = 3.0; // k for BelowKSigma, area threshold for Absolute

    static FilterRule none() { return {}; }
    static FilterRule below_k_sigma(double k = 3.0) { return {Kind::BelowKSigma, k}; }
    static FilterRule absolute(double min_area) { return {Kind::Absolute, min_area}; }
    std::string describe() const;
};

/// Removes small patches. BelowKSigma drops patches with area < k * the
/// population standard deviation of patch areas.
std::vector<Patch> filter_small(std::vector<Patch> patches, const FilterRule& rule);

/// NP, LPI, ENN (centroid to nearest same-category patch centroid) and PARA
/// over the given patches.
LandscapeReport metrics(const std::vector<Patch>& patches, double total_landscape_area);

/// Landscape-pattern similarity: 1 - mean normalized index difference.
/// NP/ENN/PARA compare relatively, LPI absolutely. Indices missing from
/// either report, or with a zero actual value for relative indices, are
/// skipped (names recorded in *skipped when given).
double li_similarity(const LandscapeReport& sim, const LandscapeReport& actual,
                     std::vector<std::string>* skipped = nullptr);

/// Convenience for external index rows (reports built from plain numbers).
LandscapeReport report_from_values(double np, double lpi, std::optional<double> enn,
                                   double para);

} // namespace parcelca
