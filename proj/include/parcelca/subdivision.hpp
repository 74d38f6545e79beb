#pragma once

#include "parcelca/parcel.hpp"

#include <string>
#include <vector>

namespace parcelca {

struct SubdivisionConfig {
    /// Stop splitting once a piece's area is <= target. 0 means "use the
    /// mean area of the input parcels", computed once before any splitting.
    double target_area = 0.0;
    /// Safety bound on dichotomy depth per parcel.
    int max_depth = 32;
};

struct SubdivisionResult {
    Landscape landscape;
    /// Parcels kept whole because no valid cut was found.
    std::vector<std::string> failed_ids;
};

/// Iterative dichotomy: every parcel is bisected until each piece's area is
/// at or below the target. Children inherit the parent's category and carry
/// parent_id; already-small parcels pass through untouched, so the operation
/// is idempotent. Output order and ids are deterministic given input order.
SubdivisionResult subdivide(const Landscape& ls, const SubdivisionConfig& cfg = {});

} // namespace parcelca
