#include "parcelca/demand.hpp"

#include "parcelca/assess.hpp"
#include "parcelca/error.hpp"

#include <cmath>
#include <numeric>

namespace parcelca {

void TransitionMatrix::validate() const {
    if (k <= 0 || p.size() != static_cast<std::size_t>(k) * static_cast<std::size_t>(k))
        throw ValueError("transition matrix: bad dimensions");
    for (int r = 0; r < k; ++r) {
        double sum = 0.0;
        for (int c = 0; c < k; ++c) {
            const double v = at(r, c);
            if (v < 0.0 || v > 1.0 + 1e-12)
                throw ValueError("transition matrix: entry outside [0,1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ValueError("transition matrix: row " + std::to_string(r) +
                             " does not sum to 1");
    }
}

CrossTab crosstab(const Landscape& t0, const Landscape& t1, const Landscape& min_cells,
                  double period_years) {
    const auto labels0 = label_overlay(min_cells, t0);
    const auto labels1 = label_overlay(min_cells, t1);
    CrossTab ct;
    ct.k = t0.categories.size();
    ct.period_years = period_years;
    ct.areas.assign(static_cast<std::size_t>(ct.k) * static_cast<std::size_t>(ct.k), 0.0);
    for (std::size_t i = 0; i < min_cells.size(); ++i)
        ct.at(labels0[i], labels1[i]) += min_cells.parcels[i].area;
    return ct;
}

TransitionMatrix to_conditional(const CrossTab& ct) {
    TransitionMatrix tm;
    tm.k = ct.k;
    tm.p.assign(ct.areas.size(), 0.0);
    for (int r = 0; r < ct.k; ++r) {
        double row_sum = 0.0;
        for (int c = 0; c < ct.k; ++c) row_sum += ct.at(r, c);
        if (row_sum > 0.0) {
            for (int c = 0; c < ct.k; ++c) tm.at(r, c) = ct.at(r, c) / row_sum;
        } else {
            tm.at(r, r) = 1.0; // a category absent at t0 persists by convention
        }
    }
    return tm;
}

TransitionMatrix constrain(const TransitionMatrix& tm,
                           const std::vector<std::pair<int, int>>& forbidden) {
    TransitionMatrix out = tm;
    for (const auto& [from, to] : forbidden) {
        if (from < 0 || from >= tm.k || to < 0 || to >= tm.k)
            throw ValueError("constrain: category id out of range");
        if (from == to)
            throw ValueError("constrain: persistence (diagonal) cannot be forbidden");
        out.at(from, from) += out.at(from, to);
        out.at(from, to) = 0.0;
    }
    return out;
}

std::vector<double> project(const std::vector<double>& current_shares,
                            const TransitionMatrix& tm, int steps) {
    if (static_cast<int>(current_shares.size()) != tm.k)
        throw ValueError("project: share vector length differs from matrix size");
    if (steps < 0) throw ValueError("project: negative step count");
    const double sum = std::accumulate(current_shares.begin(), current_shares.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) throw ValueError("project: shares do not sum to 1");

    std::vector<double> shares = current_shares;
    std::vector<double> next(shares.size(), 0.0);
    for (int s = 0; s < steps; ++s) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int from = 0; from < tm.k; ++from)
            for (int to = 0; to < tm.k; ++to) next[to] += shares[from] * tm.at(from, to);
        // Renormalize away accumulated rounding so long horizons stay on the simplex.
        const double t = std::accumulate(next.begin(), next.end(), 0.0);
        if (t > 0.0)
            for (double& v : next) v /= t;
        shares = next;
    }
    return shares;
}

Demand to_demand(const std::vector<double>& projected_shares, double total_area) {
    if (total_area <= 0.0) throw ValueError("to_demand: non-positive total area");
    const double sum =
        std::accumulate(projected_shares.begin(), projected_shares.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) throw ValueError("to_demand: shares do not sum to 1");
    Demand d;
    d.target_area.reserve(projected_shares.size());
    for (double s : projected_shares) d.target_area.push_back(s * total_area);
    return d;
}

} // namespace parcelca
