#include "parcelca/vecli.hpp"

#include "parcelca/error.hpp"
#include "parcelca/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>

namespace parcelca {

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        // Attach the larger root under the smaller for canonical roots.
        if (b < a) std::swap(a, b);
        parent[b] = a;
    }
};

struct AdjacentPair {
    std::size_t a, b;
    double shared_len;
};

/// All same-category parcel pairs with shared boundary above tol, each
/// unordered pair once.
std::vector<AdjacentPair> adjacency_edges(const Landscape& ls, double tol) {
    const geom::SpatialIndex index = ls.build_index();
    std::vector<std::vector<AdjacentPair>> per_parcel(ls.size());
    parallel_for(ls.size(), [&](std::size_t i) {
        const Parcel& pi = ls.parcels[i];
        for (std::size_t j : index.query_box(pi.geometry.bbox().inflated(tol))) {
            if (j <= i) continue; // each unordered pair once
            const Parcel& pj = ls.parcels[j];
            if (pj.category != pi.category) continue;
            const double len = geom::shared_boundary_length(pi.geometry, pj.geometry, tol);
            if (len > tol) per_parcel[i].push_back({i, j, len});
        }
    });
    std::vector<AdjacentPair> edges;
    for (auto& v : per_parcel)
        for (auto& e : v) edges.push_back(e);
    return edges;
}

double population_sigma(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return std::sqrt(var / xs.size());
}

} // namespace

TopologyReport topology_check(const Landscape& ls, double tol) {
    if (tol < 0.0) throw ValueError("topology_check: negative tolerance");
    TopologyReport report;

    for (const Parcel& p : ls.parcels) {
        bool bad = !geom::ring_is_simple(p.geometry.exterior);
        for (const auto& h : p.geometry.holes) bad = bad || !geom::ring_is_simple(h);
        if (bad) report.self_intersections.push_back(p.id);
    }

    const geom::SpatialIndex index = ls.build_index();
    const double touch_tol = 1e-9 * std::max(1.0, std::max(std::abs(ls.total_area), 1.0));
    std::mutex mu;
    parallel_for(ls.size(), [&](std::size_t i) {
        const Parcel& pi = ls.parcels[i];
        for (std::size_t j : index.query_box(pi.geometry.bbox().inflated(tol))) {
            if (j <= i) continue;
            const Parcel& pj = ls.parcels[j];
            const double overlap = geom::intersection_area(pi.geometry, pj.geometry);
            if (overlap > tol * tol) {
                std::lock_guard<std::mutex> lock(mu);
                report.overlaps.emplace_back(pi.id, pj.id);
                continue;
            }
            if (tol > 0.0) {
                const double near = geom::shared_boundary_length(pi.geometry, pj.geometry, tol);
                if (near > tol) {
                    const double touching =
                        geom::shared_boundary_length(pi.geometry, pj.geometry, touch_tol);
                    if (touching <= touch_tol) {
                        std::lock_guard<std::mutex> lock(mu);
                        report.gaps.emplace_back(pi.id, pj.id);
                    }
                }
            }
        }
    });
    auto sort_pairs = [](std::vector<std::pair<std::string, std::string>>& v) {
        std::sort(v.begin(), v.end());
    };
    sort_pairs(report.overlaps);
    sort_pairs(report.gaps);
    return report;
}

std::vector<Patch> merge_patches(const Landscape& ls, double adjacency_tol) {
    if (adjacency_tol < 0.0) throw ValueError("merge_patches: negative tolerance");
    const auto edges = adjacency_edges(ls, adjacency_tol);
    UnionFind uf(ls.size());
    for (const auto& e : edges) uf.unite(e.a, e.b);

    // Root -> patch slot, roots in ascending parcel order for determinism.
    std::vector<std::size_t> root_of(ls.size());
    for (std::size_t i = 0; i < ls.size(); ++i) root_of[i] = uf.find(i);
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < ls.size(); ++i)
        if (root_of[i] == i) roots.push_back(i);

    std::vector<std::size_t> slot(ls.size(), 0);
    for (std::size_t s = 0; s < roots.size(); ++s) slot[roots[s]] = s;

    std::vector<Patch> patches(roots.size());
    for (std::size_t i = 0; i < ls.size(); ++i) {
        Patch& patch = patches[slot[root_of[i]]];
        const Parcel& p = ls.parcels[i];
        patch.category = p.category;
        patch.members.push_back(i);
        patch.area += p.area;
        patch.perimeter += p.perimeter;
        patch.centroid.x += p.centroid.x * p.area;
        patch.centroid.y += p.centroid.y * p.area;
    }
    for (const auto& e : edges) patches[slot[root_of[e.a]]].perimeter -= 2.0 * e.shared_len;
    for (Patch& patch : patches) {
        patch.centroid.x /= patch.area;
        patch.centroid.y /= patch.area;
    }
    return patches;
}

std::string FilterRule::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::None: os << "none"; break;
        case Kind::BelowKSigma: os << "below_" << value << "_sigma"; break;
        case Kind::Absolute: os << "absolute_" << value; break;
    }
    return os.str();
}

std::vector<Patch> filter_small(std::vector<Patch> patches, const FilterRule& rule) {
    switch (rule.kind) {
        case FilterRule::Kind::None:
            return patches;
        case FilterRule::Kind::BelowKSigma: {
            if (patches.empty())
                throw ValueError("filter_small: statistical rule on an empty patch set");
            std::vector<double> areas;
            areas.reserve(patches.size());
            for (const Patch& p : patches) areas.push_back(p.area);
            const double cut = rule.value * population_sigma(areas);
            std::erase_if(patches, [&](const Patch& p) { return p.area < cut; });
            return patches;
        }
        case FilterRule::Kind::Absolute:
            std::erase_if(patches, [&](const Patch& p) { return p.area < rule.value; });
            return patches;
    }
    return patches;
}

LandscapeReport metrics(const std::vector<Patch>& patches, double total_landscape_area) {
    if (total_landscape_area <= 0.0) throw ValueError("metrics: non-positive landscape area");
    LandscapeReport r;
    r.np = static_cast<int>(patches.size());
    if (patches.empty()) return r;

    int max_cat = 0;
    for (const Patch& p : patches) max_cat = std::max(max_cat, p.category);
    r.per_category.resize(static_cast<std::size_t>(max_cat) + 1);

    // Group patch indices by category for the nearest-neighbour step.
    std::vector<std::vector<std::size_t>> by_cat(r.per_category.size());
    for (std::size_t i = 0; i < patches.size(); ++i)
        by_cat[static_cast<std::size_t>(patches[i].category)].push_back(i);

    double para_sum = 0.0;
    double max_area = 0.0;
    for (const Patch& p : patches) {
        para_sum += p.perimeter / p.area;
        max_area = std::max(max_area, p.area);
    }
    r.lpi = max_area / total_landscape_area;
    r.para = para_sum / static_cast<double>(patches.size());

    double enn_sum = 0.0;
    std::size_t enn_count = 0;
    for (std::size_t cat = 0; cat < by_cat.size(); ++cat) {
        const auto& group = by_cat[cat];
        CategoryIndices& ci = r.per_category[cat];
        ci.np = static_cast<int>(group.size());
        double cat_para = 0.0, cat_max = 0.0;
        for (std::size_t gi : group) {
            cat_para += patches[gi].perimeter / patches[gi].area;
            cat_max = std::max(cat_max, patches[gi].area);
        }
        if (!group.empty()) {
            ci.para = cat_para / static_cast<double>(group.size());
            ci.lpi = cat_max / total_landscape_area;
        }
        if (group.size() < 2) continue;
        std::vector<geom::Point> centroids;
        centroids.reserve(group.size());
        for (std::size_t gi : group) centroids.push_back(patches[gi].centroid);
        const geom::KdTree tree(centroids);
        double cat_enn = 0.0;
        for (std::size_t gi = 0; gi < group.size(); ++gi) {
            const double d = tree.nearest_distance(centroids[gi], gi);
            cat_enn += d;
            enn_sum += d;
            ++enn_count;
        }
        ci.enn = cat_enn / static_cast<double>(group.size());
    }
    if (enn_count > 0) r.enn = enn_sum / static_cast<double>(enn_count);
    return r;
}

double li_similarity(const LandscapeReport& sim, const LandscapeReport& actual,
                     std::vector<std::string>* skipped) {
    double delta_sum = 0.0;
    int n = 0;
    auto add_relative = [&](const char* name, double s, double o) {
        if (o == 0.0) {
            if (skipped) skipped->push_back(name);
            return;
        }
        delta_sum += std::abs(s - o) / o;
        ++n;
    };
    add_relative("NP", static_cast<double>(sim.np), static_cast<double>(actual.np));
    delta_sum += std::abs(sim.lpi - actual.lpi); // LPI is already a fraction
    ++n;
    if (sim.enn && actual.enn) {
        add_relative("ENN", *sim.enn, *actual.enn);
    } else if (skipped && (sim.enn.has_value() != actual.enn.has_value())) {
        skipped->push_back("ENN");
    }
    add_relative("PARA", sim.para, actual.para);
    if (n == 0) throw ValueError("li_similarity: no comparable indices");
    return 1.0 - delta_sum / static_cast<double>(n);
}

LandscapeReport report_from_values(double np, double lpi, std::optional<double> enn,
                                   double para) {
    LandscapeReport r;
    r.np = static_cast<int>(std::llround(np));
    r.lpi = lpi;
    r.enn = enn;
    r.para = para;
    return r;
}

} // namespace parcelca
