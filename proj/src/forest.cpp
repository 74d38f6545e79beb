#include "parcelca/error.hpp"
#include "parcelca/models.hpp"
#include "parcelca/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace parcelca {

namespace {

using forest::Node;
using forest::Tree;

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

double gini(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double g = 1.0;
    for (std::size_t c : counts) {
        const double f = static_cast<double>(c) / static_cast<double>(total);
        g -= f * f;
    }
    return g;
}

class TreeBuilder {
public:
    TreeBuilder(const TrainingSet& ts, const RfHyper& hyper, Rng rng)
        : ts_(ts), hyper_(hyper), rng_(rng),
          mtry_(std::max<std::size_t>(
              1, static_cast<std::size_t>(std::sqrt(static_cast<double>(ts.p))))) {}

    Tree build(std::vector<std::size_t> rows) {
        Tree tree;
        grow(tree, std::move(rows), 0);
        return tree;
    }

private:
    int grow(Tree& tree, std::vector<std::size_t> rows, int depth) {
        const int me = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        std::vector<std::size_t> counts(static_cast<std::size_t>(ts_.num_categories), 0);
        for (std::size_t r : rows) counts[static_cast<std::size_t>(ts_.y[r])] += 1;
        const double node_gini = gini(counts, rows.size());

        const bool pure = node_gini == 0.0;
        if (pure || depth >= hyper_.max_depth ||
            rows.size() < 2 * static_cast<std::size_t>(hyper_.min_leaf)) {
            make_leaf(tree.nodes[static_cast<std::size_t>(me)], counts, rows.size());
            return me;
        }

        const SplitChoice split = best_split(rows, counts, node_gini);
        if (split.feature < 0) {
            make_leaf(tree.nodes[static_cast<std::size_t>(me)], counts, rows.size());
            return me;
        }

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows) {
            (ts_.x[r * ts_.p + static_cast<std::size_t>(split.feature)] <= split.threshold
                 ? left_rows
                 : right_rows)
                .push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        const int left = grow(tree, std::move(left_rows), depth + 1);
        const int right = grow(tree, std::move(right_rows), depth + 1);
        Node& nd = tree.nodes[static_cast<std::size_t>(me)];
        nd.feature = split.feature;
        nd.threshold = split.threshold;
        nd.left = left;
        nd.right = right;
        return me;
    }

    void make_leaf(Node& nd, const std::vector<std::size_t>& counts, std::size_t total) {
        nd.feature = -1;
        nd.leaf.assign(counts.size(), 0.0);
        for (std::size_t c = 0; c < counts.size(); ++c)
            nd.leaf[c] = static_cast<double>(counts[c]) / static_cast<double>(total);
    }

    SplitChoice best_split(const std::vector<std::size_t>& rows,
                           const std::vector<std::size_t>& parent_counts,
                           double parent_gini) {
        // Feature subsample: first mtry entries of a partially shuffled list.
        std::vector<std::size_t> features(ts_.p);
        std::iota(features.begin(), features.end(), std::size_t{0});
        for (std::size_t i = 0; i < mtry_ && i + 1 < features.size(); ++i) {
            const std::size_t j = i + rng_.next_below(features.size() - i);
            std::swap(features[i], features[j]);
        }

        SplitChoice best;
        const std::size_t n = rows.size();
        std::vector<std::pair<double, int>> vals(n);
        std::vector<std::size_t> left_counts(parent_counts.size());
        for (std::size_t fi = 0; fi < mtry_ && fi < features.size(); ++fi) {
            const std::size_t f = features[fi];
            for (std::size_t i = 0; i < n; ++i)
                vals[i] = {ts_.x[rows[i] * ts_.p + f], ts_.y[rows[i]]};
            std::sort(vals.begin(), vals.end());
            if (vals.front().first == vals.back().first) continue;

            std::fill(left_counts.begin(), left_counts.end(), 0);
            std::size_t nl = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left_counts[static_cast<std::size_t>(vals[i].second)] += 1;
                ++nl;
                if (vals[i].first == vals[i + 1].first) continue;
                const std::size_t nr = n - nl;
                if (nl < static_cast<std::size_t>(hyper_.min_leaf) ||
                    nr < static_cast<std::size_t>(hyper_.min_leaf))
                    continue;
                double right_gini = 1.0, left_gini = 1.0;
                {
                    double gl = 0.0, gr = 0.0;
                    for (std::size_t c = 0; c < left_counts.size(); ++c) {
                        const double fl =
                            static_cast<double>(left_counts[c]) / static_cast<double>(nl);
                        const double fr =
                            static_cast<double>(parent_counts[c] - left_counts[c]) /
                            static_cast<double>(nr);
                        gl += fl * fl;
                        gr += fr * fr;
                    }
                    left_gini = 1.0 - gl;
                    right_gini = 1.0 - gr;
                }
                const double gain =
                    parent_gini - (static_cast<double>(nl) / static_cast<double>(n)) * left_gini -
                    (static_cast<double>(nr) / static_cast<double>(n)) * right_gini;
                if (gain > best.gain + 1e-15) {
                    best.gain = gain;
                    best.feature = static_cast<int>(f);
                    best.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
                }
            }
        }
        return best;
    }

    const TrainingSet& ts_;
    const RfHyper& hyper_;
    Rng rng_;
    std::size_t mtry_;
};

std::vector<std::size_t> sample_rows(const std::vector<std::size_t>& train_idx, double fraction,
                                     bool bootstrap, Rng& rng) {
    const std::size_t n = train_idx.size();
    std::vector<std::size_t> rows;
    if (bootstrap) {
        rows.reserve(n);
        for (std::size_t i = 0; i < n; ++i) rows.push_back(train_idx[rng.next_below(n)]);
        return rows;
    }
    const auto take = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))));
    std::vector<std::size_t> pool = train_idx;
    for (std::size_t i = 0; i < take && i + 1 < pool.size(); ++i) {
        const std::size_t j = i + rng.next_below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    rows.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(std::min(take, pool.size())));
    return rows;
}

void predict_tree(const Tree& tree, const double* xi, std::size_t p, double* out, int k) {
    (void)p;
    int node = 0;
    while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const Node& nd = tree.nodes[static_cast<std::size_t>(node)];
        node = xi[nd.feature] <= nd.threshold ? nd.left : nd.right;
    }
    const auto& leaf = tree.nodes[static_cast<std::size_t>(node)].leaf;
    for (int c = 0; c < k; ++c) out[c] += leaf[static_cast<std::size_t>(c)];
}

} // namespace

ProbabilityModel train_rf(const TrainingSet& ts, const RfHyper& hyper) {
    if (ts.train_idx.empty()) throw ValueError("train_rf: empty training split");
    if (hyper.trees < 1) throw ValueError("train_rf: need at least one tree");
    if (hyper.per_tree_sample_fraction <= 0.0 || hyper.per_tree_sample_fraction > 1.0)
        throw ValueError("train_rf: per-tree sample fraction must be in (0, 1]");

    const auto ntrees = static_cast<std::size_t>(hyper.trees);
    std::vector<Tree> trees(ntrees);
    std::vector<std::vector<std::size_t>> samples(ntrees);

    parallel_for(ntrees, [&](std::size_t t) {
        Rng rng = derive_rng(ts.seed, {0xF0285ull, t});
        samples[t] = sample_rows(ts.train_idx, hyper.per_tree_sample_fraction, hyper.bootstrap, rng);
        TreeBuilder builder(ts, hyper, rng);
        trees[t] = builder.build(samples[t]);
    });

    // Out-of-bag score: rows of the training split not sampled by a tree vote
    // through that tree; accuracy over rows with at least one vote.
    double oob = -1.0;
    {
        const int k = ts.num_categories;
        std::vector<double> votes(ts.n * static_cast<std::size_t>(k), 0.0);
        std::vector<int> nvotes(ts.n, 0);
        std::vector<char> in_sample(ts.n);
        for (std::size_t t = 0; t < ntrees; ++t) {
            std::fill(in_sample.begin(), in_sample.end(), 0);
            for (std::size_t r : samples[t]) in_sample[r] = 1;
            for (std::size_t r : ts.train_idx) {
                if (in_sample[r]) continue;
                predict_tree(trees[t], ts.x.data() + r * ts.p, ts.p,
                             votes.data() + r * static_cast<std::size_t>(k), k);
                nvotes[r] += 1;
            }
        }
        std::size_t scored = 0, hits = 0;
        for (std::size_t r : ts.train_idx) {
            if (nvotes[r] == 0) continue;
            ++scored;
            const double* row = votes.data() + r * static_cast<std::size_t>(k);
            const auto best = std::max_element(row, row + k) - row;
            if (static_cast<int>(best) == ts.y[r]) ++hits;
        }
        if (scored > 0) oob = static_cast<double>(hits) / static_cast<double>(scored);
    }

    ProbabilityModel m;
    m.kind = ModelKind::Rf;
    m.category_names = ts.category_names;
    m.feature_names = ts.feature_names;
    m.num_features = ts.p;
    m.num_categories = ts.num_categories;
    m.seed = ts.seed;
    m.trees = std::move(trees);
    m.rf_hyper = hyper;
    m.oob_accuracy = oob;
    m.holdout_accuracy = holdout_accuracy(m, ts);
    return m;
}

} // namespace parcelca
