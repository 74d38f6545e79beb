#pragma once

#include "parcelca/features.hpp"
#include "parcelca/parcel.hpp"
#include "parcelca/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace parcelca {

/// Supervised snapshot: features at t0, observed category at t1, and a
/// seeded train/holdout split.
struct TrainingSet {
    std::vector<double> x; // n x p, row-major
    std::vector<int> y;    // n labels
    std::size_t n = 0;
    std::size_t p = 0;
    int num_categories = 0;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> holdout_idx;
    std::uint64_t seed = 0;
    std::vector<std::string> feature_names;
    std::vector<std::string> category_names;
};

/// Labels every cell against the t1 reference and splits reproducibly.
/// `balanced` oversamples minority classes in the training half.
TrainingSet build_training_set(const Landscape& cells, const FeatureMatrix& features,
                               const Landscape& actual_t1, double split_train_fraction,
                               std::uint64_t seed, bool balanced = false);

/// Assembles a TrainingSet from raw arrays (fixtures and tests).
TrainingSet make_training_set(std::vector<double> x, std::vector<int> y, std::size_t p,
                              int num_categories, double split_train_fraction,
                              std::uint64_t seed);

struct LrHyper {
    double learning_rate = 0.5;
    double l2 = 1e-4;
    int epochs = 500;
};

struct MlpHyper {
    int hidden_layers = 3;
    /// 0 means twice the input dimension.
    int hidden_width = 0;
    int epochs = 400;
    double learning_rate = 0.2;
    double momentum = 0.9;
    int folds = 10;
    /// Extra widths to evaluate by cross-validation; the default width is
    /// always a candidate.
    std::vector<int> width_candidates;
    /// Validation accuracy is checkpointed every this many epochs.
    int checkpoint_every = 20;
};

struct RfHyper {
    int trees = 80;
    /// Each tree trains on this share of the training rows, drawn without
    /// replacement; the rest stays out-of-bag.
    double per_tree_sample_fraction = 0.7;
    /// Classic bootstrap sampling with replacement instead.
    bool bootstrap = false;
    int max_depth = 32;
    int min_leaf = 1;
};

enum class ModelKind { Lr, Mlp, Rf };

namespace mlp {

/// Fully connected tanh network with a softmax head. Weights per layer are
/// (in+1) x out with the bias in the last row.
struct Net {
    std::vector<int> sizes; // input, hidden..., output
    std::vector<std::vector<double>> weights;

    static Net init(const std::vector<int>& sizes, Rng& rng);
    /// Probability rows for a batch.
    void predict(const double* x, std::size_t rows, std::size_t p, double* out) const;
    /// Mean cross-entropy over the given rows plus the full gradient.
    double loss_and_gradient(const std::vector<double>& x, const std::vector<int>& y,
                             const std::vector<std::size_t>& rows, std::size_t p,
                             std::vector<std::vector<double>>& grad) const;
};

} // namespace mlp

namespace forest {

struct Node {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> leaf; // class distribution at leaves
};

struct Tree {
    std::vector<Node> nodes;
    const Node& root() const { return nodes.front(); }
};

} // namespace forest

/// A trained transition-rule miner: feature vector in, probability simplex
/// over categories out.
struct ProbabilityModel {
    ModelKind kind = ModelKind::Lr;
    std::vector<std::string> category_names;
    std::vector<std::string> feature_names;
    std::size_t num_features = 0;
    int num_categories = 0;
    std::uint64_t seed = 0;
    double holdout_accuracy = 0.0;

    // Exactly one of these is populated, per kind.
    std::vector<double> lr_weights; // K x (p+1), bias last
    mlp::Net net;
    std::vector<forest::Tree> trees;
    double oob_accuracy = -1.0; // RF only; -1 when not applicable

    LrHyper lr_hyper;
    MlpHyper mlp_hyper;
    RfHyper rf_hyper;

    /// n x K probability rows; every row sums to 1 within 1e-9.
    std::vector<double> predict(const std::vector<double>& x, std::size_t rows) const;
    std::vector<double> predict(const FeatureMatrix& f) const;

    std::string to_json() const;
    static ProbabilityModel from_json(const std::string& text);
};

ProbabilityModel train_lr(const TrainingSet& ts, const LrHyper& hyper = {});
ProbabilityModel train_mlp(const TrainingSet& ts, const MlpHyper& hyper = {});
ProbabilityModel train_rf(const TrainingSet& ts, const RfHyper& hyper = {});

/// Accuracy of a model over the holdout rows of a training set.
double holdout_accuracy(const ProbabilityModel& m, const TrainingSet& ts);

} // namespace parcelca
