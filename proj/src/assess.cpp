#include "parcelca/assess.hpp"

#include "parcelca/error.hpp"
#include "parcelca/parallel.hpp"

#include <map>
#include <sstream>

namespace parcelca {

std::vector<int> label_overlay(const Landscape& cells, const Landscape& reference) {
    if (cells.categories.size() != reference.categories.size() &&
        !(cells.categories == reference.categories))
        throw ValueError("label_overlay: category tables differ");
    const geom::SpatialIndex ref_index = reference.build_index();
    std::vector<int> labels(cells.size(), -1);

    parallel_for(cells.size(), [&](std::size_t i) {
        const Parcel& cell = cells.parcels[i];
        std::map<int, double> overlap; // category -> area, ordered for ties
        for (std::size_t j : ref_index.query_box(cell.geometry.bbox())) {
            const Parcel& ref = reference.parcels[j];
            const double a = geom::intersection_area(cell.geometry, ref.geometry);
            if (a > 0.0) overlap[ref.category] += a;
        }
        int best = -1;
        double best_area = 0.0;
        for (const auto& [cat, a] : overlap) {
            // Strict > keeps the smallest category id on an exact tie.
            if (a > best_area) {
                best_area = a;
                best = cat;
            }
        }
        labels[i] = best;
    });

    std::ostringstream missing;
    int nmissing = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) {
            if (nmissing < 20) missing << (nmissing ? ", " : "") << cells.parcels[i].id;
            ++nmissing;
        }
    }
    if (nmissing > 0)
        throw ValueError("label_overlay: " + std::to_string(nmissing) +
                         " cells have no reference overlap: " + missing.str());
    return labels;
}

ConfusionAreas categorize(const std::vector<int>& initial, const std::vector<int>& simulated,
                          const std::vector<int>& actual, const std::vector<double>& areas,
                          AssessMode mode) {
    const std::size_t n = initial.size();
    if (simulated.size() != n || actual.size() != n ||
        (mode == AssessMode::Area && areas.size() != n))
        throw ValueError("categorize: category/area arrays differ in length");

    ConfusionAreas sum;
    constexpr std::size_t kChunk = 4096;
    sum = parallel_reduce<ConfusionAreas>(
        n, kChunk, ConfusionAreas{},
        [&](std::size_t b, std::size_t e) {
            ConfusionAreas part;
            for (std::size_t i = b; i < e; ++i) {
                const bool changed_sim = simulated[i] != initial[i];
                const bool changed_act = actual[i] != initial[i];
                if (!changed_sim && !changed_act) continue;
                const double w = mode == AssessMode::Area ? areas[i] : 1.0;
                if (!changed_sim && changed_act) {
                    part.a += w;
                } else if (changed_sim && changed_act) {
                    (simulated[i] == actual[i] ? part.b : part.c) += w;
                } else {
                    part.d += w;
                }
            }
            return part;
        },
        [](ConfusionAreas acc, const ConfusionAreas& p) {
            acc.a += p.a;
            acc.b += p.b;
            acc.c += p.c;
            acc.d += p.d;
            return acc;
        });
    return sum;
}

AccuracyReport figure_of_merit(const ConfusionAreas& c, AssessMode mode) {
    auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
    AccuracyReport r;
    r.confusion = c;
    r.mode = mode;
    r.fom = ratio(c.b, c.a + c.b + c.c + c.d);
    r.pa = ratio(c.b, c.a + c.b + c.c);
    r.ua = ratio(c.b, c.b + c.c + c.d);
    return r;
}

} // namespace parcelca
