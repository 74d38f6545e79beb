#pragma once

#include "parcelca/parcel.hpp"

#include <utility>
#include <vector>

namespace parcelca {

/// Per-category target areas (m^2) at the horizon; sums to the landscape area.
struct Demand {
    std::vector<double> target_area;
};

/// K x K area matrix: entry (a, b) is the area that moved from category a at
/// t0 to category b at t1.
struct CrossTab {
    std::vector<double> areas; // K*K row-major
    int k = 0;
    double period_years = 0.0;

    double& at(int from, int to) { return areas[static_cast<std::size_t>(from) * k + to]; }
    double at(int from, int to) const { return areas[static_cast<std::size_t>(from) * k + to]; }
};

/// Row-stochastic K x K matrix.
struct TransitionMatrix {
    std::vector<double> p; // K*K row-major
    int k = 0;

    double& at(int from, int to) { return p[static_cast<std::size_t>(from) * k + to]; }
    double at(int from, int to) const { return p[static_cast<std::size_t>(from) * k + to]; }
    void validate() const; // throws unless rows sum to 1 within 1e-9
};

/// Area-weighted cross-tabulation of two dates over a shared minimum-cell
/// lattice (both dates are overlay-labeled onto min_cells).
CrossTab crosstab(const Landscape& t0, const Landscape& t1, const Landscape& min_cells,
                  double period_years);

/// Row-normalizes a cross-tabulation; zero-area rows become identity rows.
TransitionMatrix to_conditional(const CrossTab& ct);

/// Zeroes forbidden transitions and moves their mass to the diagonal
/// (the parcel persists). Forbidding a diagonal entry is an error.
TransitionMatrix constrain(const TransitionMatrix& tm,
                           const std::vector<std::pair<int, int>>& forbidden);

/// shares * tm^steps.
std::vector<double> project(const std::vector<double>& current_shares,
                            const TransitionMatrix& tm, int steps);

Demand to_demand(const std::vector<double>& projected_shares, double total_area);

} // namespace parcelca
