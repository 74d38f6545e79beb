#pragma once

#include "parcelca/geom.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace parcelca {

/// Dense category table: ids are 0..K-1, names unique.
class CategoryTable {
public:
    CategoryTable() = default;
    explicit CategoryTable(std::vector<std::string> names);

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name_of(int id) const;
    /// Returns -1 when the name is unknown.
    int id_of(const std::string& name) const;
    const std::vector<std::string>& names() const { return names_; }

    friend bool operator==(const CategoryTable& a, const CategoryTable& b) {
        return a.names_ == b.names_;
    }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> ids_;
};

/// A land parcel: the atomic simulation cell once subdivided. Measurements
/// are cached at construction because the simulation reads them in hot loops.
struct Parcel {
    std::string id;
    geom::Polygon geometry;
    int category = 0;
    std::optional<std::string> parent_id;

    double area = 0.0;
    double perimeter = 0.0;
    geom::Point centroid;

    /// True when the source file carried a numeric feature id (round-trip).
    bool id_numeric = false;

    static Parcel make(std::string id, geom::Polygon geometry, int category,
                       std::optional<std::string> parent_id = std::nullopt);
};

/// A land-use map at one date: parcels plus the category table.
struct Landscape {
    std::vector<Parcel> parcels;
    CategoryTable categories;
    double total_area = 0.0;
    /// True when the source file used category names (not numeric codes).
    bool names_in_file = true;

    void refresh_total_area();
    /// Throws ValueError on duplicate ids or invalid category ids.
    void validate() const;

    std::size_t size() const { return parcels.size(); }
    /// Index lookup by parcel id; throws ValueError when absent.
    std::size_t index_of(const std::string& id) const;

    /// Bounding-box tree over parcels (boxes + centroids).
    geom::SpatialIndex build_index() const;
};

Landscape make_landscape(std::vector<Parcel> parcels, CategoryTable categories);

/// Per-category area sums, indexed by category id.
std::vector<double> category_areas(const Landscape& ls);

} // namespace parcelca
