#include "parcelca/subdivision.hpp"

#include "parcelca/error.hpp"
#include "parcelca/parallel.hpp"

#include <algorithm>
#include <mutex>

namespace parcelca {

namespace {

// Splits one polygon recursively. Pieces are ordered low side before high
// side and by centroid abscissa within a side so the leaf order (and with it
// the child id suffixes) is stable for a given input.
void split_recursive(const geom::Polygon& poly, double piece_area, double target_area,
                     int depth, int max_depth, std::vector<geom::Polygon>& out) {
    if (piece_area <= target_area || depth >= max_depth) {
        out.push_back(poly);
        return;
    }
    geom::SplitResult cut = geom::bisect(poly);
    std::vector<geom::Polygon> pieces;
    pieces.reserve(cut.below.size() + cut.above.size());
    auto order_side = [](std::vector<geom::Polygon>& side) {
        std::sort(side.begin(), side.end(), [](const geom::Polygon& a, const geom::Polygon& b) {
            const geom::Point ca = geom::centroid(a);
            const geom::Point cb = geom::centroid(b);
            return ca.x < cb.x || (ca.x == cb.x && ca.y < cb.y);
        });
    };
    order_side(cut.below);
    order_side(cut.above);
    for (auto& p : cut.below) pieces.push_back(std::move(p));
    for (auto& p : cut.above) pieces.push_back(std::move(p));
    for (const geom::Polygon& piece : pieces)
        split_recursive(piece, geom::area(piece), target_area, depth + 1, max_depth, out);
}

} // namespace

SubdivisionResult subdivide(const Landscape& ls, const SubdivisionConfig& cfg) {
    if (cfg.target_area < 0.0) throw ValueError("subdivide: negative target area");
    if (cfg.max_depth < 1) throw ValueError("subdivide: max_depth must be >= 1");

    double target = cfg.target_area;
    if (target == 0.0) {
        if (ls.parcels.empty()) {
            return SubdivisionResult{ls, {}};
        }
        target = ls.total_area / static_cast<double>(ls.parcels.size());
    }

    struct PerParcel {
        std::vector<geom::Polygon> pieces; // empty when the parcel passes through
        bool failed = false;
    };
    std::vector<PerParcel> results(ls.parcels.size());

    parallel_for(ls.parcels.size(), [&](std::size_t i) {
        const Parcel& parent = ls.parcels[i];
        if (parent.area <= target) return; // pass-through, fully unchanged
        try {
            split_recursive(parent.geometry, parent.area, target, 0, cfg.max_depth,
                            results[i].pieces);
        } catch (const BisectFailedError&) {
            results[i].pieces.clear();
            results[i].failed = true;
        }
    });

    std::vector<Parcel> out;
    std::vector<std::string> failed;
    out.reserve(ls.parcels.size());
    for (std::size_t i = 0; i < ls.parcels.size(); ++i) {
        const Parcel& parent = ls.parcels[i];
        if (results[i].failed) {
            failed.push_back(parent.id);
            out.push_back(parent);
            continue;
        }
        if (results[i].pieces.empty()) {
            out.push_back(parent);
            continue;
        }
        const auto& pieces = results[i].pieces;
        for (std::size_t k = 0; k < pieces.size(); ++k) {
            Parcel child = Parcel::make(parent.id + "#" + std::to_string(k), pieces[k],
                                        parent.category, parent.id);
            child.id_numeric = false;
            out.push_back(std::move(child));
        }
    }

    Landscape result = make_landscape(std::move(out), ls.categories);
    result.names_in_file = ls.names_in_file;
    return SubdivisionResult{std::move(result), std::move(failed)};
}

} // namespace parcelca
