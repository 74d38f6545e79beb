#pragma once

#include "parcelca/geom.hpp"
#include "parcelca/parcel.hpp"

#include <string>
#include <vector>

namespace parcelca {

/// Row-major raster of one spatial driving variable. Row 0 is the TOP row,
/// matching the ESRI ASCII grid layout it serializes to.
struct VariableGrid {
    geom::Point origin;   // lower-left corner
    double cell_size = 30.0;
    int ncols = 0;
    int nrows = 0;
    std::vector<double> values; // nrows * ncols, row-major, top row first
    double nodata = -9999.0;

    double& at(int col, int row) { return values[static_cast<std::size_t>(row) * ncols + col]; }
    double at(int col, int row) const {
        return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(ncols) + col];
    }
    bool is_nodata(double v) const { return v == nodata; }
    geom::Point cell_center(int col, int row) const {
        return {origin.x + (col + 0.5) * cell_size,
                origin.y + (nrows - 1 - row + 0.5) * cell_size};
    }
    void validate() const;
};

enum class SampleMode { Centroid, ArealMean };

/// Per-parcel feature rows; column order follows the given grid name order.
struct FeatureMatrix {
    std::vector<std::string> variable_names;
    std::vector<std::string> parcel_ids;
    std::vector<double> values; // rows x cols, row-major

    std::size_t rows() const { return parcel_ids.size(); }
    std::size_t cols() const { return variable_names.size(); }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
};

struct GridExtent {
    geom::Point origin;
    double cell_size = 30.0;
    int ncols = 0;
    int nrows = 0;
};

/// Extent that covers `box` with the given cell size (outward snapped).
GridExtent extent_for(const geom::Box& box, double cell_size, double margin = 0.0);

/// Euclidean distance from each cell center to the nearest source point.
VariableGrid distance_grid(const std::vector<geom::Point>& sources, const GridExtent& extent);

/// Gaussian kernel density surface; each kernel integrates to one, so the
/// grid total times the cell area approximates the source count.
VariableGrid kde_grid(const std::vector<geom::Point>& sources, const GridExtent& extent,
                      double bandwidth);

/// Isotropic rule-of-thumb bandwidth (Scott): n^(-1/6) * pooled std dev.
double scott_bandwidth(const std::vector<geom::Point>& sources);

/// Min-max scaling to [0, 1]; a constant grid maps to all zeros. Nodata
/// cells are preserved.
VariableGrid normalize(const VariableGrid& g);

/// Value of one grid at a parcel: containing cell of the centroid, or the
/// area-weighted mean over intersected cells.
double sample(const Parcel& parcel, const VariableGrid& g, SampleMode mode);

/// Assembles the per-parcel feature matrix. Every grid is min-max normalized
/// first, so all values land in [0, 1].
FeatureMatrix assemble(const Landscape& ls,
                       const std::vector<std::pair<std::string, VariableGrid>>& grids,
                       SampleMode mode = SampleMode::Centroid);

} // namespace parcelca
