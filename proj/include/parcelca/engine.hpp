#pragma once

#include "parcelca/demand.hpp"
#include "parcelca/features.hpp"
#include "parcelca/models.hpp"
#include "parcelca/parcel.hpp"
#include "parcelca/rng.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace parcelca {

struct SimConfig {
    double neighborhood_radius = 600.0; // meters
    double alpha = 1.0;                 // random-factor exponent, in [1, 10]
    int iterations = 10;                // M
    double initial_threshold = 0.8;
    double threshold_decay = 0.9;   // applied after `patience` starved iterations
    int patience = 1;
    double demand_slack = 0.0; // m^2; 0 means the mean cell area
    std::uint64_t seed = 0;
    /// Pool every eligible (cell, category) pair instead of one best
    /// category per cell.
    bool all_pairs_candidates = false;

    void validate() const;
};

struct RestrictedZone {
    geom::Polygon zone;
    double overlap_fraction = 0.5;
    /// Categories that cells overlapping the zone may not convert to.
    /// Empty blocks every conversion.
    std::vector<int> blocked_categories;
};

struct ScenarioConstraints {
    std::vector<RestrictedZone> restricted_zones;
    std::vector<std::pair<int, int>> forbidden_transitions; // (from, to)
};

struct Conversion {
    std::size_t cell = 0;
    int from = 0;
    int to = 0;
    double probability = 0.0; // combined P at selection time
};

struct IterationRecord {
    int iteration = 0;
    double threshold = 0.0;
    double quota = 0.0;
    double converted_area = 0.0;
    std::vector<Conversion> conversions;
    std::vector<double> demand_remaining; // after this iteration
};

struct SimulationTrace {
    std::uint64_t seed = 0;
    std::vector<IterationRecord> iterations;
    bool demand_met = true;
    std::vector<double> shortfall; // per-category deficit left at the end
};

struct SimulationResult {
    Landscape final_landscape;
    SimulationTrace trace;
};

/// Static per-cell neighbour weights within the buffer radius:
/// w_ij = exp(-d_ij / decay) * (S_j / S_i) / (S_max / S_min).
/// decay defaults to the buffer radius itself.
class NeighborhoodModel {
public:
    NeighborhoodModel(const Landscape& ls, const geom::SpatialIndex& index, double radius,
                      double decay = 0.0);

    /// Per-category effect for cell i under the given category assignment:
    /// same-category weight share over all neighbour weights. Cells with no
    /// neighbours get the uniform 1/K fallback. `out` has K entries.
    void effect(std::size_t i, const std::vector<int>& categories, int k, double* out) const;

    std::size_t neighbor_count(std::size_t i) const {
        return offsets_[i + 1] - offsets_[i];
    }

private:
    std::vector<std::size_t> offsets_;
    std::vector<std::pair<std::size_t, double>> links_;
};

/// Per-category neighbourhood effect of one cell (uniform when isolated).
std::vector<double> neighborhood_effect(std::size_t cell, const Landscape& ls,
                                        const geom::SpatialIndex& index, double radius,
                                        double decay = 0.0);

/// RA = 1 + (-ln y)^alpha for a given y in (0, 1].
double random_factor_value(double y, double alpha);

/// RA = 1 + (-ln y)^alpha with y uniform in (0, 1].
double random_factor(Rng& rng, double alpha);

/// cells x K mask: 0 where a conversion is blocked by a restricted zone or a
/// forbidden (from, to) pair, 1 otherwise.
std::vector<std::uint8_t> restriction_mask(const Landscape& ls,
                                           const ScenarioConstraints& sc);

/// Elementwise P = Po * Omega * Pr * RA; not renormalized.
void combined_probability(const double* po, const double* omega, const std::uint8_t* pr,
                          double ra, int k, double* out);

/// Samples one entry with probability weight/sum(weights). Throws when no
/// weight is positive.
std::size_t roulette_select(const std::vector<std::pair<std::size_t, double>>& candidates,
                            Rng& rng);

/// One demand-constrained CA sweep over an immutable snapshot. Exposed for
/// tests; simulate() drives it.
class Engine {
public:
    Engine(const Landscape& initial, const ProbabilityModel& model,
           const FeatureMatrix& features, const SimConfig& cfg, const Demand& demand,
           const ScenarioConstraints& constraints);

    /// Evaluates probabilities on the snapshot in `categories`, then selects
    /// and applies conversions. Mutates categories and demand_remaining.
    IterationRecord step(std::vector<int>& categories, std::vector<double>& demand_remaining,
                         double threshold, int iteration);

    double quota() const { return quota_; }
    double slack() const { return slack_; }
    const std::vector<double>& initial_demand_remaining() const { return initial_remaining_; }

private:
    const Landscape& ls_;
    const SimConfig& cfg_;
    int k_;
    std::vector<double> po_;             // cells x K, static
    std::vector<std::uint8_t> zone_mask_; // cells x K, static (zones only)
    std::vector<std::uint8_t> forbidden_; // K x K
    NeighborhoodModel neighborhood_;
    std::vector<double> areas_;
    double quota_ = 0.0;
    double slack_ = 0.0;
    std::vector<double> initial_remaining_;
};

SimulationResult simulate(const Landscape& initial, const ProbabilityModel& model,
                          const FeatureMatrix& features, const SimConfig& cfg,
                          const Demand& demand, const ScenarioConstraints& constraints);

/// Applies a trace's conversions to the initial landscape.
Landscape replay(const Landscape& initial, const SimulationTrace& trace);

struct SweepRow {
    double radius = 0.0;
    double fom = 0.0;
    double pa = 0.0;
    double ua = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows; // sorted by radius
    double best_radius = 0.0;
};

/// One full simulation per radius, each scored against the actual landscape
/// by figure of merit.
SweepResult sweep_radius(const Landscape& initial, const ProbabilityModel& model,
                         const FeatureMatrix& features, const SimConfig& cfg,
                         const Demand& demand, const ScenarioConstraints& constraints,
                         const Landscape& actual, const std::vector<double>& radii);

} // namespace parcelca
