#include "parcelca/parcel.hpp"

#include "parcelca/error.hpp"

#include <unordered_set>

namespace parcelca {

CategoryTable::CategoryTable(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (!ids_.emplace(names_[i], static_cast<int>(i)).second)
            throw ValueError("duplicate category name: " + names_[i]);
    }
}

const std::string& CategoryTable::name_of(int id) const {
    if (id < 0 || id >= size()) throw ValueError("category id out of range");
    return names_[static_cast<std::size_t>(id)];
}

int CategoryTable::id_of(const std::string& name) const {
    auto it = ids_.find(name);
    return it == ids_.end() ? -1 : it->second;
}

Parcel Parcel::make(std::string id, geom::Polygon geometry, int category,
                    std::optional<std::string> parent_id) {
    Parcel p;
    p.id = std::move(id);
    p.geometry = std::move(geometry);
    p.category = category;
    p.parent_id = std::move(parent_id);
    p.area = geom::area(p.geometry);
    p.perimeter = geom::perimeter(p.geometry);
    p.centroid = geom::centroid(p.geometry);
    return p;
}

void Landscape::refresh_total_area() {
    total_area = 0.0;
    for (const Parcel& p : parcels) total_area += p.area;
}

void Landscape::validate() const {
    std::unordered_set<std::string> seen;
    seen.reserve(parcels.size());
    for (const Parcel& p : parcels) {
        if (!seen.insert(p.id).second) throw ValueError("duplicate parcel id: " + p.id);
        if (p.category < 0 || p.category >= categories.size())
            throw ValueError("parcel " + p.id + " has an invalid category id");
    }
}

std::size_t Landscape::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < parcels.size(); ++i)
        if (parcels[i].id == id) return i;
    throw ValueError("unknown parcel id: " + id);
}

geom::SpatialIndex Landscape::build_index() const {
    std::vector<geom::Box> boxes;
    std::vector<geom::Point> centroids;
    boxes.reserve(parcels.size());
    centroids.reserve(parcels.size());
    for (const Parcel& p : parcels) {
        boxes.push_back(p.geometry.bbox());
        centroids.push_back(p.centroid);
    }
    return geom::SpatialIndex(std::move(boxes), std::move(centroids));
}

Landscape make_landscape(std::vector<Parcel> parcels, CategoryTable categories) {
    Landscape ls;
    ls.parcels = std::move(parcels);
    ls.categories = std::move(categories);
    ls.refresh_total_area();
    ls.validate();
    return ls;
}

std::vector<double> category_areas(const Landscape& ls) {
    std::vector<double> sums(static_cast<std::size_t>(ls.categories.size()), 0.0);
    for (const Parcel& p : ls.parcels) sums[static_cast<std::size_t>(p.category)] += p.area;
    return sums;
}

} // namespace parcelca
