#include "parcelca/models.hpp"

#include "parcelca/assess.hpp"
#include "parcelca/error.hpp"
#include "parcelca/parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace parcelca {

using nlohmann::json;

namespace {

void softmax_row(double* z, int k) {
    double mx = z[0];
    for (int i = 1; i < k; ++i) mx = std::max(mx, z[i]);
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        z[i] = std::exp(z[i] - mx);
        sum += z[i];
    }
    for (int i = 0; i < k; ++i) z[i] /= sum;
}

std::vector<std::string> default_names(const char* prefix, std::size_t count) {
    std::vector<std::string> names;
    names.reserve(count);
    for (std::size_t i = 0; i < count; ++i) names.push_back(prefix + std::to_string(i));
    return names;
}

void split_indices(TrainingSet& ts, double fraction) {
    if (fraction <= 0.0 || fraction > 1.0)
        throw ValueError("training split fraction must be in (0, 1]");
    std::vector<std::size_t> order(ts.n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = derive_rng(ts.seed, {0x5EED5117ull});
    for (std::size_t i = ts.n; i > 1; --i)
        std::swap(order[i - 1], order[rng.next_below(i)]);
    const auto ntrain =
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(ts.n)));
    ts.train_idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(ntrain));
    ts.holdout_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(ntrain), order.end());
}

void require_two_categories(const TrainingSet& ts, const char* who) {
    std::vector<char> seen(static_cast<std::size_t>(ts.num_categories), 0);
    int present = 0;
    for (std::size_t i : ts.train_idx) {
        if (!seen[static_cast<std::size_t>(ts.y[i])]) {
            seen[static_cast<std::size_t>(ts.y[i])] = 1;
            ++present;
        }
    }
    if (present < 2)
        throw ValueError(std::string(who) + ": training labels cover fewer than 2 categories");
}

} // namespace

TrainingSet make_training_set(std::vector<double> x, std::vector<int> y, std::size_t p,
                              int num_categories, double split_train_fraction,
                              std::uint64_t seed) {
    TrainingSet ts;
    ts.p = p;
    ts.n = y.size();
    if (x.size() != ts.n * p) throw ValueError("training set: x size does not match n*p");
    for (int label : y)
        if (label < 0 || label >= num_categories)
            throw ValueError("training set: label out of range");
    ts.x = std::move(x);
    ts.y = std::move(y);
    ts.num_categories = num_categories;
    ts.seed = seed;
    ts.feature_names = default_names("x", p);
    ts.category_names = default_names("cat", static_cast<std::size_t>(num_categories));
    split_indices(ts, split_train_fraction);
    return ts;
}

TrainingSet build_training_set(const Landscape& cells, const FeatureMatrix& features,
                               const Landscape& actual_t1, double split_train_fraction,
                               std::uint64_t seed, bool balanced) {
    if (features.rows() != cells.size())
        throw ValueError("build_training_set: feature rows do not match cells");
    TrainingSet ts;
    ts.n = cells.size();
    ts.p = features.cols();
    ts.num_categories = cells.categories.size();
    ts.x = features.values;
    ts.y = label_overlay(cells, actual_t1);
    ts.seed = seed;
    ts.feature_names = features.variable_names;
    ts.category_names = cells.categories.names();
    split_indices(ts, split_train_fraction);

    if (balanced && !ts.train_idx.empty()) {
        std::vector<std::vector<std::size_t>> per_class(
            static_cast<std::size_t>(ts.num_categories));
        for (std::size_t i : ts.train_idx)
            per_class[static_cast<std::size_t>(ts.y[i])].push_back(i);
        std::size_t largest = 0;
        for (const auto& g : per_class) largest = std::max(largest, g.size());
        Rng rng = derive_rng(seed, {0xBA1A9CEDull});
        std::vector<std::size_t> boosted = ts.train_idx;
        for (const auto& g : per_class) {
            if (g.empty()) continue;
            for (std::size_t extra = g.size(); extra < largest; ++extra)
                boosted.push_back(g[rng.next_below(g.size())]);
        }
        ts.train_idx = std::move(boosted);
    }
    return ts;
}

// ---------------------------------------------------------------------------
// Logistic regression: full-batch gradient descent on the multinomial
// cross-entropy with an L2 penalty (bias excluded).
// ---------------------------------------------------------------------------

namespace {

void lr_predict_row(const std::vector<double>& weights, std::size_t p, int k, const double* xi,
                    double* out) {
    for (int c = 0; c < k; ++c) {
        const double* w = weights.data() + static_cast<std::size_t>(c) * (p + 1);
        double z = w[p]; // bias
        for (std::size_t f = 0; f < p; ++f) z += w[f] * xi[f];
        out[c] = z;
    }
    softmax_row(out, k);
}

} // namespace

ProbabilityModel train_lr(const TrainingSet& ts, const LrHyper& hyper) {
    require_two_categories(ts, "train_lr");

    const std::size_t p = ts.p;
    const int k = ts.num_categories;
    std::vector<double> w(static_cast<std::size_t>(k) * (p + 1), 0.0);
    std::vector<double> grad(w.size());
    std::vector<double> probs(static_cast<std::size_t>(k));
    const double inv_n = 1.0 / static_cast<double>(ts.train_idx.size());

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i : ts.train_idx) {
            const double* xi = ts.x.data() + i * p;
            lr_predict_row(w, p, k, xi, probs.data());
            for (int c = 0; c < k; ++c) {
                const double err =
                    probs[static_cast<std::size_t>(c)] - (ts.y[i] == c ? 1.0 : 0.0);
                double* g = grad.data() + static_cast<std::size_t>(c) * (p + 1);
                for (std::size_t f = 0; f < p; ++f) g[f] += err * xi[f];
                g[p] += err;
            }
        }
        double gmax = 0.0;
        for (int c = 0; c < k; ++c) {
            double* g = grad.data() + static_cast<std::size_t>(c) * (p + 1);
            const double* wc = w.data() + static_cast<std::size_t>(c) * (p + 1);
            for (std::size_t f = 0; f <= p; ++f) {
                g[f] *= inv_n;
                if (f < p) g[f] += hyper.l2 * wc[f];
                gmax = std::max(gmax, std::abs(g[f]));
            }
        }
        for (std::size_t j = 0; j < w.size(); ++j) w[j] -= hyper.learning_rate * grad[j];
        if (gmax < 1e-10) break;
    }

    ProbabilityModel m;
    m.kind = ModelKind::Lr;
    m.category_names = ts.category_names;
    m.feature_names = ts.feature_names;
    m.num_features = p;
    m.num_categories = k;
    m.seed = ts.seed;
    m.lr_weights = std::move(w);
    m.lr_hyper = hyper;
    m.holdout_accuracy = holdout_accuracy(m, ts);
    return m;
}

// ---------------------------------------------------------------------------
// Multi-layer perceptron
// ---------------------------------------------------------------------------

namespace mlp {

Net Net::init(const std::vector<int>& sizes, Rng& rng) {
    if (sizes.size() < 2) throw ValueError("mlp: need at least input and output layers");
    Net net;
    net.sizes = sizes;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const int fan_in = sizes[l];
        const int fan_out = sizes[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::vector<double> w(static_cast<std::size_t>(fan_in + 1) * fan_out);
        for (double& v : w) v = (2.0 * rng.next_double() - 1.0) * limit;
        for (int c = 0; c < fan_out; ++c)
            w[static_cast<std::size_t>(fan_in) * fan_out + c] = 0.0; // zero biases
        net.weights.push_back(std::move(w));
    }
    return net;
}

namespace {

void forward_row(const Net& net, const double* x,
                 std::vector<std::vector<double>>& activations) {
    const std::size_t nl = net.sizes.size();
    activations.resize(nl);
    activations[0].assign(x, x + net.sizes[0]);
    for (std::size_t l = 0; l + 1 < nl; ++l) {
        const int in = net.sizes[l];
        const int out = net.sizes[l + 1];
        const auto& w = net.weights[l];
        auto& next = activations[l + 1];
        next.assign(static_cast<std::size_t>(out), 0.0);
        for (int c = 0; c < out; ++c) {
            double z = w[static_cast<std::size_t>(in) * out + c]; // bias row
            for (int r = 0; r < in; ++r)
                z += w[static_cast<std::size_t>(r) * out + c] *
                     activations[l][static_cast<std::size_t>(r)];
            next[static_cast<std::size_t>(c)] = z;
        }
        if (l + 2 < nl) {
            for (double& v : next) v = std::tanh(v);
        } else {
            softmax_row(next.data(), out);
        }
    }
}

} // namespace

void Net::predict(const double* x, std::size_t rows, std::size_t p, double* out) const {
    if (static_cast<int>(p) != sizes.front())
        throw ValueError("mlp predict: feature dimension mismatch");
    const int k = sizes.back();
    std::vector<std::vector<double>> acts;
    for (std::size_t r = 0; r < rows; ++r) {
        forward_row(*this, x + r * p, acts);
        std::copy(acts.back().begin(), acts.back().end(),
                  out + r * static_cast<std::size_t>(k));
    }
}

double Net::loss_and_gradient(const std::vector<double>& x, const std::vector<int>& y,
                              const std::vector<std::size_t>& rows, std::size_t p,
                              std::vector<std::vector<double>>& grad) const {
    grad.resize(weights.size());
    for (std::size_t l = 0; l < weights.size(); ++l) grad[l].assign(weights[l].size(), 0.0);

    const std::size_t nl = sizes.size();
    double loss = 0.0;
    std::vector<std::vector<double>> acts;
    std::vector<std::vector<double>> delta(nl);
    for (std::size_t row : rows) {
        forward_row(*this, x.data() + row * p, acts);
        const auto& probs = acts.back();
        const int label = y[row];
        loss -= std::log(std::max(probs[static_cast<std::size_t>(label)], 1e-300));

        delta[nl - 1].assign(probs.begin(), probs.end());
        delta[nl - 1][static_cast<std::size_t>(label)] -= 1.0;

        for (std::size_t l = nl - 1; l-- > 0;) {
            const int in = sizes[l];
            const int out = sizes[l + 1];
            const auto& d_out = delta[l + 1];
            auto& g = grad[l];
            for (int r = 0; r < in; ++r) {
                const double a = acts[l][static_cast<std::size_t>(r)];
                for (int c = 0; c < out; ++c)
                    g[static_cast<std::size_t>(r) * out + c] +=
                        a * d_out[static_cast<std::size_t>(c)];
            }
            for (int c = 0; c < out; ++c)
                g[static_cast<std::size_t>(in) * out + c] += d_out[static_cast<std::size_t>(c)];
            if (l == 0) break;
            auto& d_in = delta[l];
            d_in.assign(static_cast<std::size_t>(in), 0.0);
            const auto& w = weights[l];
            for (int r = 0; r < in; ++r) {
                double s = 0.0;
                for (int c = 0; c < out; ++c)
                    s += w[static_cast<std::size_t>(r) * out + c] *
                         d_out[static_cast<std::size_t>(c)];
                const double a = acts[l][static_cast<std::size_t>(r)];
                d_in[static_cast<std::size_t>(r)] = s * (1.0 - a * a);
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(rows.size());
    for (auto& g : grad)
        for (double& v : g) v *= inv;
    return loss * inv;
}

} // namespace mlp

namespace {

double accuracy_on(const mlp::Net& net, const std::vector<double>& x, const std::vector<int>& y,
                   const std::vector<std::size_t>& rows, std::size_t p) {
    if (rows.empty()) return 0.0;
    const int k = net.sizes.back();
    std::vector<double> probs(static_cast<std::size_t>(k));
    std::size_t hits = 0;
    for (std::size_t r : rows) {
        net.predict(x.data() + r * p, 1, p, probs.data());
        const auto best = std::max_element(probs.begin(), probs.end()) - probs.begin();
        if (static_cast<int>(best) == y[r]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(rows.size());
}

mlp::Net train_net(const std::vector<int>& sizes, const TrainingSet& ts,
                   const std::vector<std::size_t>& rows, const MlpHyper& hyper, Rng rng,
                   int epochs, const std::vector<std::size_t>* val_rows,
                   std::vector<std::pair<int, double>>* val_curve) {
    mlp::Net net = mlp::Net::init(sizes, rng);
    std::vector<std::vector<double>> grad, velocity;
    velocity.resize(net.weights.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l)
        velocity[l].assign(net.weights[l].size(), 0.0);

    for (int epoch = 1; epoch <= epochs; ++epoch) {
        net.loss_and_gradient(ts.x, ts.y, rows, ts.p, grad);
        for (std::size_t l = 0; l < net.weights.size(); ++l) {
            for (std::size_t j = 0; j < net.weights[l].size(); ++j) {
                velocity[l][j] =
                    hyper.momentum * velocity[l][j] - hyper.learning_rate * grad[l][j];
                net.weights[l][j] += velocity[l][j];
            }
        }
        if (val_rows && val_curve && (epoch % hyper.checkpoint_every == 0 || epoch == epochs))
            val_curve->emplace_back(epoch, accuracy_on(net, ts.x, ts.y, *val_rows, ts.p));
    }
    return net;
}

} // namespace

ProbabilityModel train_mlp(const TrainingSet& ts, const MlpHyper& hyper) {
    require_two_categories(ts, "train_mlp");
    if (hyper.hidden_layers < 1) throw ValueError("train_mlp: need at least one hidden layer");

    const int default_width =
        hyper.hidden_width > 0 ? hyper.hidden_width : std::max(2, 2 * static_cast<int>(ts.p));
    std::vector<int> widths{default_width};
    for (int w : hyper.width_candidates)
        if (w > 0 && std::find(widths.begin(), widths.end(), w) == widths.end())
            widths.push_back(w);

    auto sizes_for = [&](int width) {
        std::vector<int> sizes{static_cast<int>(ts.p)};
        for (int l = 0; l < hyper.hidden_layers; ++l) sizes.push_back(width);
        sizes.push_back(ts.num_categories);
        return sizes;
    };

    // K-fold cross-validation over the training rows picks (width, epochs).
    int best_width = default_width;
    int best_epochs = hyper.epochs;
    const int folds = std::min<int>(hyper.folds, static_cast<int>(ts.train_idx.size()));
    if (folds >= 2) {
        double best_score = -1.0;
        for (int width : widths) {
            std::vector<std::pair<int, double>> mean_curve;
            for (int fold = 0; fold < folds; ++fold) {
                std::vector<std::size_t> fit_rows, val_rows;
                for (std::size_t i = 0; i < ts.train_idx.size(); ++i) {
                    const bool in_val =
                        static_cast<int>(i % static_cast<std::size_t>(folds)) == fold;
                    (in_val ? val_rows : fit_rows).push_back(ts.train_idx[i]);
                }
                std::vector<std::pair<int, double>> curve;
                train_net(sizes_for(width), ts, fit_rows, hyper,
                          derive_rng(ts.seed, {0x313Aull, static_cast<std::uint64_t>(width),
                                               static_cast<std::uint64_t>(fold)}),
                          hyper.epochs, &val_rows, &curve);
                if (mean_curve.empty()) {
                    mean_curve = curve;
                } else {
                    for (std::size_t c = 0; c < curve.size() && c < mean_curve.size(); ++c)
                        mean_curve[c].second += curve[c].second;
                }
            }
            for (auto& entry : mean_curve) entry.second /= static_cast<double>(folds);
            for (const auto& [epoch, acc] : mean_curve) {
                if (acc > best_score + 1e-12) {
                    best_score = acc;
                    best_width = width;
                    best_epochs = epoch;
                }
            }
        }
    }

    mlp::Net net =
        train_net(sizes_for(best_width), ts, ts.train_idx, hyper,
                  derive_rng(ts.seed, {0x313Aull, 0xF17A1ull,
                                       static_cast<std::uint64_t>(best_width)}),
                  best_epochs, nullptr, nullptr);

    ProbabilityModel m;
    m.kind = ModelKind::Mlp;
    m.category_names = ts.category_names;
    m.feature_names = ts.feature_names;
    m.num_features = ts.p;
    m.num_categories = ts.num_categories;
    m.seed = ts.seed;
    m.net = std::move(net);
    m.mlp_hyper = hyper;
    m.mlp_hyper.hidden_width = best_width;
    m.mlp_hyper.epochs = best_epochs;
    m.holdout_accuracy = holdout_accuracy(m, ts);
    return m;
}

// ---------------------------------------------------------------------------
// Prediction and serialization
// ---------------------------------------------------------------------------

std::vector<double> ProbabilityModel::predict(const std::vector<double>& x,
                                              std::size_t rows) const {
    if (x.size() != rows * num_features)
        throw ValueError("predict: feature matrix size does not match the model");
    const int k = num_categories;
    std::vector<double> out(rows * static_cast<std::size_t>(k), 0.0);
    const std::size_t p = num_features;

    parallel_for(rows, [&](std::size_t r) {
        double* row = out.data() + r * static_cast<std::size_t>(k);
        const double* xi = x.data() + r * p;
        switch (kind) {
            case ModelKind::Lr:
                lr_predict_row(lr_weights, p, k, xi, row);
                break;
            case ModelKind::Mlp:
                net.predict(xi, 1, p, row);
                break;
            case ModelKind::Rf: {
                for (const auto& tree : trees) {
                    int node = 0;
                    while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
                        const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
                        node = xi[nd.feature] <= nd.threshold ? nd.left : nd.right;
                    }
                    const auto& leaf = tree.nodes[static_cast<std::size_t>(node)].leaf;
                    for (int c = 0; c < k; ++c) row[c] += leaf[static_cast<std::size_t>(c)];
                }
                break;
            }
        }
        double sum = 0.0;
        for (int c = 0; c < k; ++c) sum += row[c];
        if (sum > 0.0)
            for (int c = 0; c < k; ++c) row[c] /= sum;
    });
    return out;
}

std::vector<double> ProbabilityModel::predict(const FeatureMatrix& f) const {
    if (f.cols() != num_features)
        throw ValueError("predict: feature count " + std::to_string(f.cols()) +
                         " does not match the model's " + std::to_string(num_features));
    return predict(f.values, f.rows());
}

double holdout_accuracy(const ProbabilityModel& m, const TrainingSet& ts) {
    if (ts.holdout_idx.empty()) return 0.0;
    std::vector<double> x;
    x.reserve(ts.holdout_idx.size() * ts.p);
    for (std::size_t i : ts.holdout_idx)
        x.insert(x.end(), ts.x.begin() + static_cast<std::ptrdiff_t>(i * ts.p),
                 ts.x.begin() + static_cast<std::ptrdiff_t>((i + 1) * ts.p));
    const auto probs = m.predict(x, ts.holdout_idx.size());
    std::size_t hits = 0;
    const int k = m.num_categories;
    for (std::size_t r = 0; r < ts.holdout_idx.size(); ++r) {
        const double* row = probs.data() + r * static_cast<std::size_t>(k);
        const auto best = std::max_element(row, row + k) - row;
        if (static_cast<int>(best) == ts.y[ts.holdout_idx[r]]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(ts.holdout_idx.size());
}

namespace {

constexpr int kModelFormatVersion = 1;

const char* kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::Lr: return "lr";
        case ModelKind::Mlp: return "mlp";
        case ModelKind::Rf: return "rf";
    }
    return "?";
}

} // namespace

std::string ProbabilityModel::to_json() const {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["kind"] = kind_name(kind);
    j["categories"] = category_names;
    j["feature_names"] = feature_names;
    j["num_features"] = num_features;
    j["num_categories"] = num_categories;
    j["seed"] = seed;
    j["holdout_accuracy"] = holdout_accuracy;
    switch (kind) {
        case ModelKind::Lr:
            j["hyperparameters"] = {{"learning_rate", lr_hyper.learning_rate},
                                    {"l2", lr_hyper.l2},
                                    {"epochs", lr_hyper.epochs}};
            j["parameters"] = {{"weights", lr_weights}};
            break;
        case ModelKind::Mlp:
            j["hyperparameters"] = {{"hidden_layers", mlp_hyper.hidden_layers},
                                    {"hidden_width", mlp_hyper.hidden_width},
                                    {"epochs", mlp_hyper.epochs},
                                    {"learning_rate", mlp_hyper.learning_rate},
                                    {"momentum", mlp_hyper.momentum},
                                    {"folds", mlp_hyper.folds}};
            j["parameters"] = {{"sizes", net.sizes}, {"layers", net.weights}};
            break;
        case ModelKind::Rf: {
            j["hyperparameters"] = {
                {"trees", rf_hyper.trees},
                {"per_tree_sample_fraction", rf_hyper.per_tree_sample_fraction},
                {"bootstrap", rf_hyper.bootstrap},
                {"max_depth", rf_hyper.max_depth},
                {"min_leaf", rf_hyper.min_leaf}};
            json jtrees = json::array();
            for (const auto& tree : trees) {
                json nodes = json::array();
                for (const auto& nd : tree.nodes) {
                    json n;
                    n["f"] = nd.feature;
                    if (nd.feature >= 0) {
                        n["t"] = nd.threshold;
                        n["l"] = nd.left;
                        n["r"] = nd.right;
                    } else {
                        n["d"] = nd.leaf;
                    }
                    nodes.push_back(std::move(n));
                }
                jtrees.push_back(json{{"nodes", std::move(nodes)}});
            }
            j["parameters"] = {{"trees", std::move(jtrees)}};
            j["oob_accuracy"] = oob_accuracy;
            break;
        }
    }
    return j.dump(2) + "\n";
}

ProbabilityModel ProbabilityModel::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("model: invalid JSON: ") + e.what());
    }
    if (!j.contains("format_version") || !j["format_version"].is_number_integer() ||
        j["format_version"].get<int>() != kModelFormatVersion)
        throw IoError("model: unsupported or missing format_version (expected " +
                      std::to_string(kModelFormatVersion) + ")");
    try {
        ProbabilityModel m;
        const std::string kind = j.at("kind").get<std::string>();
        m.category_names = j.at("categories").get<std::vector<std::string>>();
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.num_features = j.at("num_features").get<std::size_t>();
        m.num_categories = j.at("num_categories").get<int>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.holdout_accuracy = j.at("holdout_accuracy").get<double>();
        const json& params = j.at("parameters");
        if (kind == "lr") {
            m.kind = ModelKind::Lr;
            m.lr_weights = params.at("weights").get<std::vector<double>>();
            const json& h = j.at("hyperparameters");
            m.lr_hyper = {h.at("learning_rate").get<double>(), h.at("l2").get<double>(),
                          h.at("epochs").get<int>()};
            if (m.lr_weights.size() !=
                static_cast<std::size_t>(m.num_categories) * (m.num_features + 1))
                throw IoError("model: lr weight count mismatch");
        } else if (kind == "mlp") {
            m.kind = ModelKind::Mlp;
            m.net.sizes = params.at("sizes").get<std::vector<int>>();
            m.net.weights = params.at("layers").get<std::vector<std::vector<double>>>();
            const json& h = j.at("hyperparameters");
            m.mlp_hyper.hidden_layers = h.at("hidden_layers").get<int>();
            m.mlp_hyper.hidden_width = h.at("hidden_width").get<int>();
            m.mlp_hyper.epochs = h.at("epochs").get<int>();
            m.mlp_hyper.learning_rate = h.at("learning_rate").get<double>();
            m.mlp_hyper.momentum = h.at("momentum").get<double>();
            m.mlp_hyper.folds = h.at("folds").get<int>();
            if (m.net.sizes.empty() ||
                m.net.sizes.front() != static_cast<int>(m.num_features) ||
                m.net.sizes.back() != m.num_categories)
                throw IoError("model: mlp layer sizes mismatch");
        } else if (kind == "rf") {
            m.kind = ModelKind::Rf;
            const json& h = j.at("hyperparameters");
            m.rf_hyper.trees = h.at("trees").get<int>();
            m.rf_hyper.per_tree_sample_fraction =
                h.at("per_tree_sample_fraction").get<double>();
            m.rf_hyper.bootstrap = h.at("bootstrap").get<bool>();
            m.rf_hyper.max_depth = h.at("max_depth").get<int>();
            m.rf_hyper.min_leaf = h.at("min_leaf").get<int>();
            m.oob_accuracy = j.value("oob_accuracy", -1.0);
            for (const json& jt : params.at("trees")) {
                forest::Tree tree;
                for (const json& n : jt.at("nodes")) {
                    forest::Node nd;
                    nd.feature = n.at("f").get<int>();
                    if (nd.feature >= 0) {
                        nd.threshold = n.at("t").get<double>();
                        nd.left = n.at("l").get<int>();
                        nd.right = n.at("r").get<int>();
                    } else {
                        nd.leaf = n.at("d").get<std::vector<double>>();
                    }
                    tree.nodes.push_back(std::move(nd));
                }
                m.trees.push_back(std::move(tree));
            }
        } else {
            throw IoError("model: unknown kind '" + kind + "'");
        }
        return m;
    } catch (const json::exception& e) {
        throw IoError(std::string("model: malformed document: ") + e.what());
    }
}

} // namespace parcelca
