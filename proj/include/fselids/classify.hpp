#pragma once

// Classifier families behind one train/predict contract. Every model records
// the ordered feature signature it was trained on and binds prediction data
// to it by column name, remapping nominal codes through category strings.

#include <json.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fselids/ingest.hpp"

namespace fsel {

enum class Algorithm { tree, forest, naive_bayes, knn, mlp, linear_svm };

std::string_view to_string(Algorithm algorithm);
Algorithm algorithm_from_string(std::string_view token);

struct TreeParams {
    std::size_t min_leaf = 2;
    double confidence = 0.25;
    bool prune = true;
};

struct ForestParams {
    std::size_t n_trees = 100;
    std::size_t feature_sample = 0;  // 0 selects ceil(sqrt(d))
    bool bootstrap = true;
};

struct KnnParams {
    std::size_t k = 5;
};

struct MlpParams {
    std::size_t hidden_units = 32;
    std::size_t epochs = 50;
    double learning_rate = 0.01;
    std::size_t batch_size = 32;
};

struct SvmParams {
    double lambda = 1e-4;
    std::size_t epochs = 20;
};

struct TrainParams {
    Algorithm algorithm = Algorithm::tree;
    TreeParams tree;
    ForestParams forest;
    KnnParams knn;
    MlpParams mlp;
    SvmParams svm;
    std::uint64_t seed = 1;
    std::size_t workers = 0;  // 0 = hardware concurrency; never affects results
};

/// Throws when a hyperparameter is outside its documented range.
void validate(const TrainParams& params);

nlohmann::json to_json(const TrainParams& params);
/// Reads a (possibly partial) parameter document on top of `base`.
TrainParams train_params_from_json(const nlohmann::json& doc, TrainParams base = {});

struct FeatureSpec {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    std::vector<std::string> categories;
};

using FeatureSignature = std::vector<FeatureSpec>;

FeatureSignature make_signature(const Dataset& ds, const FeatureSubset& subset);

/// A dataset's columns viewed through a model signature.
class BoundFeatures {
public:
    BoundFeatures(const Dataset& ds, const FeatureSignature& signature);

    std::size_t rows() const { return rows_; }
    std::size_t features() const { return columns_.size(); }
    bool is_numeric(std::size_t feature) const { return columns_[feature]->is_numeric(); }
    double value(std::size_t feature, std::size_t row) const { return columns_[feature]->values[row]; }
    /// Code in the signature's dictionary, or kUnknownCategory.
    std::uint32_t code(std::size_t feature, std::size_t row) const;
    std::size_t categories(std::size_t feature) const { return category_counts_[feature]; }

private:
    std::size_t rows_ = 0;
    std::vector<const Column*> columns_;
    std::vector<std::vector<std::uint32_t>> remap_;
    std::vector<std::size_t> category_counts_;
};

/// Row-major dense matrix over numeric features.
struct NumericMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

/// Requires every signature feature to be numeric.
NumericMatrix numeric_matrix(const BoundFeatures& bound);

struct TreeNode {
    enum class Kind { leaf, numeric_split, nominal_split };

    Kind kind = Kind::leaf;
    std::size_t feature = 0;              // signature position
    double threshold = 0.0;               // numeric: value <= threshold goes to children[0]
    std::vector<std::size_t> children;    // node indices; nominal: one per category
    std::size_t fallback_child = 0;       // child index used for unseen categories
    std::array<double, kNumLabels> class_counts{};
    Label prediction = Label::attack;

    bool is_leaf() const { return kind == Kind::leaf; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    std::size_t leaf_for(const BoundFeatures& x, std::size_t row) const;
    Label predict(const BoundFeatures& x, std::size_t row) const { return nodes[leaf_for(x, row)].prediction; }
    std::size_t depth() const;
    std::size_t leaves() const;
};

struct TreeGrowOptions {
    std::size_t min_leaf = 2;
    std::size_t feature_sample = 0;  // 0 = consider every feature at every node
    std::uint64_t seed = 0;          // used only when sampling features
};

/// Recursive C4.5-style induction over `rows` (duplicates allowed). Numeric
/// features split at the threshold of maximal information gain; the split
/// chosen at a node maximizes gain ratio among candidates with positive gain.
DecisionTree grow_tree(const BoundFeatures& x, std::span<const Label> labels, std::span<const std::size_t> rows,
                       const TreeGrowOptions& options);

/// Pessimistic-error subtree replacement with the given confidence factor.
void prune_tree(DecisionTree& tree, double confidence);

/// Upper confidence bound of extra errors for a leaf covering n rows with e errors.
double pessimistic_extra_errors(double n, double e, double confidence);

struct TreeModel {
    DecisionTree tree;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
};

struct GaussianStats {
    std::array<double, kNumLabels> mean{};
    std::array<double, kNumLabels> variance{};
};

struct CategoricalStats {
    std::array<std::vector<double>, kNumLabels> log_prob;  // per category
    std::array<double, kNumLabels> log_unseen{};
};

struct NaiveBayesModel {
    std::array<double, kNumLabels> log_prior{};
    std::vector<std::variant<GaussianStats, CategoricalStats>> features;
};

struct KnnModel {
    std::size_t k = 5;
    NumericMatrix points;
    std::vector<Label> labels;
};

/// Single-hidden-layer sigmoid network with a sigmoid output unit. All
/// parameters live in one flat vector: w1 (hidden x inputs, row-major), b1,
/// w2 (hidden), b2.
struct MlpNetwork {
    std::size_t inputs = 0;
    std::size_t hidden = 0;
    std::vector<double> params;

    std::size_t w1(std::size_t h, std::size_t i) const { return h * inputs + i; }
    std::size_t b1(std::size_t h) const { return hidden * inputs + h; }
    std::size_t w2(std::size_t h) const { return hidden * inputs + hidden + h; }
    std::size_t b2() const { return hidden * inputs + 2 * hidden; }
    std::size_t size() const { return hidden * inputs + 2 * hidden + 1; }

    /// Probability of the attack class.
    double forward(std::span<const double> x) const;
};

struct MlpModel {
    MlpNetwork network;
    std::vector<double> loss_history;  // mean training loss per epoch
};

struct SvmModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> objective_history;  // objective of the retained average after each epoch
};

using LearnedParameters =
    std::variant<TreeModel, ForestModel, NaiveBayesModel, KnnModel, MlpModel, SvmModel>;

struct TrainedModel {
    Algorithm algorithm = Algorithm::tree;
    TrainParams params;
    FeatureSignature signature;
    double train_seconds = 0.0;
    LearnedParameters learned;
};

TrainedModel tree_fit(const Dataset& train, const FeatureSubset& subset, const TrainParams& params);
TrainedModel forest_fit(const Dataset& train, const FeatureSubset& subset, const TrainParams& params);
TrainedModel nb_fit(const Dataset& train, const FeatureSubset& subset, const TrainParams& params);
TrainedModel knn_fit(const Dataset& train, const FeatureSubset& subset, const TrainParams& params);
TrainedModel mlp_fit(const Dataset& train, const FeatureSubset& subset, const TrainParams& params);
TrainedModel svm_fit(const Dataset& train, const FeatureSubset& subset, const TrainParams& params);

/// Dispatches on params.algorithm.
TrainedModel fit_model(const Dataset& train, const FeatureSubset& subset, const TrainParams& params);

/// Predicts every row of `ds`; throws on signature mismatch.
std::vector<Label> predict(const TrainedModel& model, const Dataset& ds);
std::vector<Label> tree_predict(const TrainedModel& model, const Dataset& ds);
std::vector<Label> knn_predict(const Dataset& train, const FeatureSubset& subset, const Dataset& test,
                               const TrainParams& params);

/// Normalized class posteriors of a naive Bayes model, indexed by label_index().
std::vector<std::array<double, kNumLabels>> nb_posteriors(const TrainedModel& model, const Dataset& ds);

/// Mean binary cross-entropy of the network on (x, y).
double mlp_loss(const MlpNetwork& net, const NumericMatrix& x, std::span<const Label> y);
/// Analytic gradient of mlp_loss, laid out like MlpNetwork::params.
std::vector<double> mlp_gradient(const MlpNetwork& net, const NumericMatrix& x, std::span<const Label> y);
MlpNetwork mlp_init(std::size_t inputs, std::size_t hidden, std::uint64_t seed);

/// lambda * |w|^2 + mean hinge loss.
double svm_objective(const SvmModel& model, const NumericMatrix& x, std::span<const Label> y, double lambda);

nlohmann::json to_json(const TrainedModel& model);
TrainedModel trained_model_from_json(const nlohmann::json& doc);

inline constexpr int kModelFormatVersion = 1;

}  // namespace fsel
