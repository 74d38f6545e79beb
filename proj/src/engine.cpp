#include "parcelca/engine.hpp"

#include "parcelca/assess.hpp"
#include "parcelca/error.hpp"
#include "parcelca/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace parcelca {

void SimConfig::validate() const {
    if (neighborhood_radius <= 0.0) throw ValueError("sim config: radius must be positive");
    if (alpha < 1.0 || alpha > 10.0) throw ValueError("sim config: alpha must be in [1, 10]");
    if (iterations < 1) throw ValueError("sim config: iterations must be >= 1");
    if (initial_threshold <= 0.0 || initial_threshold > 1.0)
        throw ValueError("sim config: initial threshold must be in (0, 1]");
    if (threshold_decay <= 0.0 || threshold_decay >= 1.0)
        throw ValueError("sim config: threshold decay must be in (0, 1)");
    if (patience < 1) throw ValueError("sim config: patience must be >= 1");
    if (demand_slack < 0.0) throw ValueError("sim config: negative demand slack");
}

// ---------------------------------------------------------------------------
// Neighbourhood effect
// ---------------------------------------------------------------------------

NeighborhoodModel::NeighborhoodModel(const Landscape& ls, const geom::SpatialIndex& index,
                                     double radius, double decay) {
    if (radius <= 0.0) throw ValueError("neighborhood: radius must be positive");
    if (decay <= 0.0) decay = radius;
    double s_max = 0.0;
    double s_min = std::numeric_limits<double>::infinity();
    for (const Parcel& p : ls.parcels) {
        s_max = std::max(s_max, p.area);
        s_min = std::min(s_min, p.area);
    }
    const double ratio = (s_min > 0.0 && s_max > 0.0) ? s_max / s_min : 1.0;

    const std::size_t n = ls.size();
    std::vector<std::vector<std::pair<std::size_t, double>>> per_cell(n);
    parallel_for(n, [&](std::size_t i) {
        const Parcel& pi = ls.parcels[i];
        for (std::size_t j : index.query_within_radius(pi.centroid, radius)) {
            if (j == i) continue;
            const Parcel& pj = ls.parcels[j];
            const double d_ij = geom::distance(pi.centroid, pj.centroid);
            const double w = std::exp(-d_ij / decay) * (pj.area / pi.area) / ratio;
            per_cell[i].emplace_back(j, w);
        }
    });

    offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + per_cell[i].size();
    links_.reserve(offsets_[n]);
    for (auto& v : per_cell)
        for (auto& link : v) links_.push_back(link);
}

void NeighborhoodModel::effect(std::size_t i, const std::vector<int>& categories, int k,
                               double* out) const {
    double total = 0.0;
    std::fill(out, out + k, 0.0);
    for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e) {
        const auto& [j, w] = links_[e];
        out[categories[j]] += w;
        total += w;
    }
    if (total <= 0.0) {
        const double uniform = 1.0 / static_cast<double>(k);
        std::fill(out, out + k, uniform);
        return;
    }
    for (int c = 0; c < k; ++c) out[c] /= total;
}

std::vector<double> neighborhood_effect(std::size_t cell, const Landscape& ls,
                                        const geom::SpatialIndex& index, double radius,
                                        double decay) {
    const NeighborhoodModel model(ls, index, radius, decay);
    std::vector<int> categories(ls.size());
    for (std::size_t i = 0; i < ls.size(); ++i) categories[i] = ls.parcels[i].category;
    std::vector<double> out(static_cast<std::size_t>(ls.categories.size()), 0.0);
    model.effect(cell, categories, ls.categories.size(), out.data());
    return out;
}

double random_factor_value(double y, double alpha) {
    if (alpha < 1.0 || alpha > 10.0) throw ValueError("random_factor: alpha must be in [1, 10]");
    if (!(y > 0.0) || y > 1.0) throw ValueError("random_factor: y must be in (0, 1]");
    return 1.0 + std::pow(-std::log(y), alpha);
}

double random_factor(Rng& rng, double alpha) {
    return random_factor_value(rng.next_open_closed(), alpha);
}

// ---------------------------------------------------------------------------
// Restriction factor
// ---------------------------------------------------------------------------

namespace {

std::vector<std::uint8_t> zone_mask(const Landscape& ls, const ScenarioConstraints& sc) {
    const int k = ls.categories.size();
    std::vector<std::uint8_t> mask(ls.size() * static_cast<std::size_t>(k), 1);
    if (sc.restricted_zones.empty()) return mask;
    for (const RestrictedZone& z : sc.restricted_zones) {
        z.zone.validate();
        if (z.overlap_fraction < 0.0 || z.overlap_fraction > 1.0)
            throw ValueError("restriction zone: overlap fraction must be in [0, 1]");
        for (int c : z.blocked_categories)
            if (c < 0 || c >= k) throw ValueError("restriction zone: bad blocked category id");
    }
    const geom::SpatialIndex index = ls.build_index();
    for (const RestrictedZone& z : sc.restricted_zones) {
        const auto candidates = index.query_box(z.zone.bbox());
        std::vector<std::uint8_t> hit(ls.size(), 0);
        parallel_for(candidates.size(), [&](std::size_t ci) {
            const std::size_t i = candidates[ci];
            const Parcel& cell = ls.parcels[i];
            const double overlap = geom::intersection_area(cell.geometry, z.zone);
            if (overlap > z.overlap_fraction * cell.area) hit[i] = 1;
        });
        for (std::size_t i = 0; i < ls.size(); ++i) {
            if (!hit[i]) continue;
            if (z.blocked_categories.empty()) {
                for (int c = 0; c < k; ++c) mask[i * static_cast<std::size_t>(k) + c] = 0;
            } else {
                for (int c : z.blocked_categories)
                    mask[i * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)] = 0;
            }
        }
    }
    return mask;
}

std::vector<std::uint8_t> forbidden_table(int k,
                                          const std::vector<std::pair<int, int>>& forbidden) {
    std::vector<std::uint8_t> table(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), 0);
    for (const auto& [from, to] : forbidden) {
        if (from < 0 || from >= k || to < 0 || to >= k)
            throw ValueError("forbidden transition: category id out of range");
        table[static_cast<std::size_t>(from) * k + to] = 1;
    }
    return table;
}

/// Fenwick tree over candidate weights for O(log n) roulette draws with removal.
class RouletteWheel {
public:
    explicit RouletteWheel(const std::vector<double>& weights)
        : n_(weights.size()), tree_(weights.size() + 1, 0.0) {
        for (std::size_t i = 0; i < n_; ++i) add(i, weights[i]);
    }

    double total() const { return prefix(n_); }

    void remove(std::size_t i, double weight) { add(i, -weight); }

    /// Index with cumulative weight bracketing u * total; u in [0, 1).
    std::size_t draw(double u) const {
        double target = u * total();
        std::size_t pos = 0;
        std::size_t bit = 1;
        while ((bit << 1) <= n_) bit <<= 1;
        for (; bit > 0; bit >>= 1) {
            const std::size_t next = pos + bit;
            if (next <= n_ && tree_[next] < target) {
                target -= tree_[next];
                pos = next;
            }
        }
        return std::min(pos, n_ - 1);
    }

private:
    void add(std::size_t i, double delta) {
        for (std::size_t j = i + 1; j <= n_; j += j & (~j + 1)) tree_[j] += delta;
    }
    double prefix(std::size_t count) const {
        double s = 0.0;
        for (std::size_t j = count; j > 0; j -= j & (~j + 1)) s += tree_[j];
        return s;
    }

    std::size_t n_;
    std::vector<double> tree_;
};

} // namespace

std::vector<std::uint8_t> restriction_mask(const Landscape& ls, const ScenarioConstraints& sc) {
    const int k = ls.categories.size();
    std::vector<std::uint8_t> mask = zone_mask(ls, sc);
    const auto forbidden = forbidden_table(k, sc.forbidden_transitions);
    for (std::size_t i = 0; i < ls.size(); ++i) {
        const int from = ls.parcels[i].category;
        for (int c = 0; c < k; ++c)
            if (forbidden[static_cast<std::size_t>(from) * k + c])
                mask[i * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)] = 0;
    }
    return mask;
}

void combined_probability(const double* po, const double* omega, const std::uint8_t* pr,
                          double ra, int k, double* out) {
    for (int c = 0; c < k; ++c) out[c] = po[c] * omega[c] * (pr[c] ? 1.0 : 0.0) * ra;
}

std::size_t roulette_select(const std::vector<std::pair<std::size_t, double>>& candidates,
                            Rng& rng) {
    double total = 0.0;
    for (const auto& [id, w] : candidates) {
        if (w < 0.0) throw ValueError("roulette_select: negative weight");
        total += w;
    }
    if (total <= 0.0) throw ValueError("roulette_select: no candidate has positive weight");
    const double target = rng.next_double() * total;
    double acc = 0.0;
    for (const auto& [id, w] : candidates) {
        acc += w;
        if (target < acc) return id;
    }
    return candidates.back().first;
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

Engine::Engine(const Landscape& initial, const ProbabilityModel& model,
               const FeatureMatrix& features, const SimConfig& cfg, const Demand& demand,
               const ScenarioConstraints& constraints)
    : ls_(initial), cfg_(cfg), k_(initial.categories.size()),
      neighborhood_(initial, initial.build_index(), cfg.neighborhood_radius) {
    cfg.validate();
    if (static_cast<int>(demand.target_area.size()) != k_)
        throw ValueError("simulate: demand categories do not match the landscape");
    if (model.num_categories != k_)
        throw ValueError("simulate: model categories do not match the landscape");
    const double target_total =
        std::accumulate(demand.target_area.begin(), demand.target_area.end(), 0.0);
    if (std::abs(target_total - ls_.total_area) > 1e-6 * std::max(1.0, ls_.total_area))
        throw ValueError("simulate: demand targets do not sum to the landscape area");

    po_ = model.predict(features);
    zone_mask_ = zone_mask(initial, constraints);
    forbidden_ = forbidden_table(k_, constraints.forbidden_transitions);

    areas_.reserve(ls_.size());
    for (const Parcel& p : ls_.parcels) areas_.push_back(p.area);

    const auto current = category_areas(initial);
    initial_remaining_.resize(static_cast<std::size_t>(k_));
    double deficit = 0.0;
    for (int c = 0; c < k_; ++c) {
        initial_remaining_[static_cast<std::size_t>(c)] =
            demand.target_area[static_cast<std::size_t>(c)] - current[static_cast<std::size_t>(c)];
        deficit += std::max(0.0, initial_remaining_[static_cast<std::size_t>(c)]);
    }
    quota_ = deficit / static_cast<double>(cfg.iterations);
    slack_ = cfg.demand_slack > 0.0
                 ? cfg.demand_slack
                 : (ls_.size() > 0 ? ls_.total_area / static_cast<double>(ls_.size()) : 0.0);
}

IterationRecord Engine::step(std::vector<int>& categories, std::vector<double>& demand_remaining,
                             double threshold, int iteration) {
    IterationRecord record;
    record.iteration = iteration;
    record.threshold = threshold;
    record.quota = quota_;

    const std::size_t n = ls_.size();
    const int k = k_;

    // Candidate evaluation against the immutable snapshot: per-cell combined
    // probability with one RA draw per cell, per-cell RNG streams.
    struct Candidate {
        std::size_t cell;
        int to;
        double p;
    };
    std::vector<std::vector<Candidate>> found(n);
    std::vector<std::uint8_t> demand_open(static_cast<std::size_t>(k), 0);
    for (int c = 0; c < k; ++c)
        demand_open[static_cast<std::size_t>(c)] = demand_remaining[static_cast<std::size_t>(c)] > 0.0;

    parallel_for(n, [&](std::size_t i) {
        const int from = categories[i];
        bool any_target = false;
        for (int c = 0; c < k; ++c)
            if (c != from && demand_open[static_cast<std::size_t>(c)]) any_target = true;
        if (!any_target) return;

        std::vector<double> omega(static_cast<std::size_t>(k));
        neighborhood_.effect(i, categories, k, omega.data());

        Rng cell_rng = derive_rng(cfg_.seed, {0xA11Dull, static_cast<std::uint64_t>(iteration), i});
        const double ra = random_factor(cell_rng, cfg_.alpha);

        const double* po = po_.data() + i * static_cast<std::size_t>(k);
        const std::uint8_t* zones = zone_mask_.data() + i * static_cast<std::size_t>(k);
        Candidate best{i, -1, 0.0};
        for (int c = 0; c < k; ++c) {
            if (c == from || !demand_open[static_cast<std::size_t>(c)]) continue;
            if (!zones[c] || forbidden_[static_cast<std::size_t>(from) * k + c]) continue;
            const double p = po[c] * omega[static_cast<std::size_t>(c)] * ra;
            if (p < threshold) continue;
            if (cfg_.all_pairs_candidates) {
                found[i].push_back({i, c, p});
            } else if (p > best.p || (p == best.p && best.to >= 0 && c < best.to)) {
                best.to = c;
                best.p = p;
            }
        }
        if (!cfg_.all_pairs_candidates && best.to >= 0) found[i].push_back(best);
    });

    std::vector<Candidate> pool;
    for (auto& v : found)
        for (auto& cand : v) pool.push_back(cand);
    if (pool.empty()) {
        record.demand_remaining = demand_remaining;
        return record;
    }

    // Roulette selection with removal from a dedicated stream. A selected
    // cell leaves the pool whether or not demand lets it convert.
    std::vector<double> weights;
    weights.reserve(pool.size());
    for (const auto& cand : pool) weights.push_back(cand.p);
    RouletteWheel wheel(weights);
    std::vector<std::uint8_t> cell_done(n, 0);
    Rng roulette_rng = derive_rng(cfg_.seed, {0x2011E77Eull, static_cast<std::uint64_t>(iteration)});

    std::size_t alive = pool.size();
    while (alive > 0 && record.converted_area < quota_ && wheel.total() > 1e-300) {
        const std::size_t pick = wheel.draw(roulette_rng.next_double());
        wheel.remove(pick, weights[pick]);
        --alive;
        const Candidate& cand = pool[pick];
        if (cell_done[cand.cell]) continue;
        cell_done[cand.cell] = 1;

        const double area = areas_[cand.cell];
        auto& remaining_to = demand_remaining[static_cast<std::size_t>(cand.to)];
        if (area > remaining_to + slack_) continue;

        const int from = categories[cand.cell];
        categories[cand.cell] = cand.to;
        remaining_to -= area;
        demand_remaining[static_cast<std::size_t>(from)] += area;
        record.converted_area += area;
        record.conversions.push_back({cand.cell, from, cand.to, cand.p});
    }

    record.demand_remaining = demand_remaining;
    return record;
}

SimulationResult simulate(const Landscape& initial, const ProbabilityModel& model,
                          const FeatureMatrix& features, const SimConfig& cfg,
                          const Demand& demand, const ScenarioConstraints& constraints) {
    Engine engine(initial, model, features, cfg, demand, constraints);

    std::vector<int> categories(initial.size());
    for (std::size_t i = 0; i < initial.size(); ++i) categories[i] = initial.parcels[i].category;
    std::vector<double> remaining = engine.initial_demand_remaining();

    SimulationTrace trace;
    trace.seed = cfg.seed;

    auto deficits_settled = [&]() {
        for (double r : remaining)
            if (r > engine.slack()) return false;
        return true;
    };

    double threshold = cfg.initial_threshold;
    int starved = 0;
    for (int it = 0; it < cfg.iterations; ++it) {
        if (deficits_settled()) break;
        IterationRecord record = engine.step(categories, remaining, threshold, it);
        const bool starving = record.converted_area < 0.1 * engine.quota();
        trace.iterations.push_back(std::move(record));
        if (starving) {
            if (++starved >= cfg.patience) {
                threshold = std::max(1e-6, threshold * cfg.threshold_decay);
                starved = 0;
            }
        } else {
            starved = 0;
        }
    }

    trace.shortfall.assign(remaining.size(), 0.0);
    for (std::size_t c = 0; c < remaining.size(); ++c)
        trace.shortfall[c] = std::max(0.0, remaining[c]);
    trace.demand_met = deficits_settled();

    Landscape final_ls = initial;
    for (std::size_t i = 0; i < final_ls.size(); ++i)
        final_ls.parcels[i].category = categories[i];

    return SimulationResult{std::move(final_ls), std::move(trace)};
}

Landscape replay(const Landscape& initial, const SimulationTrace& trace) {
    Landscape ls = initial;
    for (const IterationRecord& record : trace.iterations) {
        for (const Conversion& conv : record.conversions) {
            if (conv.cell >= ls.size()) throw ValueError("replay: conversion cell out of range");
            if (ls.parcels[conv.cell].category != conv.from)
                throw ValueError("replay: trace does not match the landscape state");
            ls.parcels[conv.cell].category = conv.to;
        }
    }
    return ls;
}

SweepResult sweep_radius(const Landscape& initial, const ProbabilityModel& model,
                         const FeatureMatrix& features, const SimConfig& cfg,
                         const Demand& demand, const ScenarioConstraints& constraints,
                         const Landscape& actual, const std::vector<double>& radii) {
    if (radii.empty()) throw ValueError("sweep_radius: no radii given");
    const auto actual_labels = label_overlay(initial, actual);
    std::vector<int> initial_labels(initial.size());
    std::vector<double> areas(initial.size());
    for (std::size_t i = 0; i < initial.size(); ++i) {
        initial_labels[i] = initial.parcels[i].category;
        areas[i] = initial.parcels[i].area;
    }

    SweepResult result;
    for (double radius : radii) {
        SimConfig run_cfg = cfg;
        run_cfg.neighborhood_radius = radius;
        const auto sim = simulate(initial, model, features, run_cfg, demand, constraints);
        std::vector<int> sim_labels(initial.size());
        for (std::size_t i = 0; i < initial.size(); ++i)
            sim_labels[i] = sim.final_landscape.parcels[i].category;
        const auto report =
            figure_of_merit(categorize(initial_labels, sim_labels, actual_labels, areas));
        result.rows.push_back({radius, report.fom, report.pa, report.ua});
    }
    std::sort(result.rows.begin(), result.rows.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.radius < b.radius; });
    double best = -1.0;
    for (const SweepRow& row : result.rows) {
        if (row.fom > best) {
            best = row.fom;
            result.best_radius = row.radius;
        }
    }
    return result;
}

} // namespace parcelca
