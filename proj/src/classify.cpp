#include "fselids/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace fsel {

namespace {

constexpr double kVarianceFloor = 1e-9;

void check_training_input(const Dataset& train, const FeatureSubset& subset) {
    if (train.empty()) throw Error("empty training set");
    if (subset.empty()) throw Error("empty feature selection");
    train.check_subset(subset);
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double target(Label l) { return l == Label::attack ? 1.0 : 0.0; }

double signed_target(Label l) { return l == Label::attack ? 1.0 : -1.0; }

template <class T>
const T& learned_as(const TrainedModel& model) {
    const T* p = std::get_if<T>(&model.learned);
    if (!p) throw Error("model parameters do not match algorithm '" + std::string(to_string(model.algorithm)) + "'");
    return *p;
}

Label vote(std::size_t attack_votes, std::size_t normal_votes) {
    return attack_votes >= normal_votes ? Label::attack : Label::normal;
}

std::array<double, kNumLabels> nb_log_joint(const NaiveBayesModel& nb, const BoundFeatures& x, std::size_t row) {
    std::array<double, kNumLabels> lp = nb.log_prior;
    for (std::size_t f = 0; f < nb.features.size(); ++f) {
        if (const auto* g = std::get_if<GaussianStats>(&nb.features[f])) {
            const double v = x.value(f, row);
            for (std::size_t c = 0; c < kNumLabels; ++c) {
                const double var = g->variance[c];
                const double d = v - g->mean[c];
                lp[c] += -0.5 * std::log(2.0 * M_PI * var) - d * d / (2.0 * var);
            }
        } else {
            const auto& cat = std::get<CategoricalStats>(nb.features[f]);
            const auto code = x.code(f, row);
            for (std::size_t c = 0; c < kNumLabels; ++c)
                lp[c] += (code == kUnknownCategory || code >= cat.log_prob[c].size()) ? cat.log_unseen[c]
                                                                                       : cat.log_prob[c][code];
        }
    }
    return lp;
}

std::vector<Label> knn_vote(const KnnModel& knn, const NumericMatrix& queries, std::size_t workers) {
    std::vector<Label> out(queries.rows);
    const std::size_t n = knn.points.rows;
    const std::size_t k = knn.k;
    const std::size_t chunk = 256;
    const std::size_t chunks = (queries.rows + chunk - 1) / chunk;
    parallel_for(chunks, workers, [&](std::size_t ci) {
        std::vector<std::pair<double, std::size_t>> dist(n);
        const std::size_t end = std::min(queries.rows, (ci + 1) * chunk);
        for (std::size_t q = ci * chunk; q < end; ++q) {
            auto query = queries.row(q);
            for (std::size_t i = 0; i < n; ++i) {
                auto p = knn.points.row(i);
                double s = 0.0;
                for (std::size_t j = 0; j < p.size(); ++j) {
                    const double d = p[j] - query[j];
                    s += d * d;
                }
                dist[i] = {s, i};
            }
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
            std::size_t attack = 0;
            for (std::size_t i = 0; i < k; ++i) attack += knn.labels[dist[i].second] == Label::attack ? 1 : 0;
            out[q] = vote(attack, k - attack);
        }
    });
    return out;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::tree: return "tree";
        case Algorithm::forest: return "forest";
        case Algorithm::naive_bayes: return "naive_bayes";
        case Algorithm::knn: return "knn";
        case Algorithm::mlp: return "mlp";
        case Algorithm::linear_svm: return "linear_svm";
    }
    return "?";
}

Algorithm algorithm_from_string(std::string_view token) {
    if (token == "tree" || token == "dt" || token == "j48") return Algorithm::tree;
    if (token == "forest" || token == "rf") return Algorithm::forest;
    if (token == "naive_bayes" || token == "nb") return Algorithm::naive_bayes;
    if (token == "knn") return Algorithm::knn;
    if (token == "mlp" || token == "ann") return Algorithm::mlp;
    if (token == "linear_svm" || token == "svm") return Algorithm::linear_svm;
    throw Error("unknown algorithm '" + std::string(token) + "'");
}

void validate(const TrainParams& p) {
    if (p.tree.min_leaf < 1) throw Error("tree.min_leaf must be >= 1");
    if (!(p.tree.confidence > 0.0 && p.tree.confidence <= 0.5)) throw Error("tree.confidence must lie in (0, 0.5]");
    if (p.forest.n_trees < 1) throw Error("forest.n_trees must be >= 1");
    if (p.knn.k < 1) throw Error("knn.k must be >= 1");
    if (p.mlp.hidden_units < 1) throw Error("mlp.hidden_units must be >= 1");
    if (!(p.mlp.learning_rate > 0.0) || !std::isfinite(p.mlp.learning_rate))
        throw Error("mlp.learning_rate must be positive");
    if (p.mlp.batch_size < 1) throw Error("mlp.batch_size must be >= 1");
    if (!(p.svm.lambda > 0.0) || !std::isfinite(p.svm.lambda)) throw Error("svm.lambda must be positive");
}

nlohmann::json to_json(const TrainParams& p) {
    return {
        {"algorithm", to_string(p.algorithm)},
        {"seed", p.seed},
        {"tree", {{"min_leaf", p.tree.min_leaf}, {"confidence", p.tree.confidence}, {"prune", p.tree.prune}}},
        {"forest",
         {{"n_trees", p.forest.n_trees}, {"feature_sample", p.forest.feature_sample}, {"bootstrap", p.forest.bootstrap}}},
        {"knn", {{"k", p.knn.k}}},
        {"mlp",
         {{"hidden_units", p.mlp.hidden_units},
          {"epochs", p.mlp.epochs},
          {"learning_rate", p.mlp.learning_rate},
          {"batch_size", p.mlp.batch_size}}},
        {"svm", {{"lambda", p.svm.lambda}, {"epochs", p.svm.epochs}}},
    };
}

TrainParams train_params_from_json(const nlohmann::json& doc, TrainParams p) {
    try {
        auto get = [](const nlohmann::json& obj, const char* key, auto& field) {
            if (obj.contains(key)) field = obj.at(key).get<std::decay_t<decltype(field)>>();
        };
        if (doc.contains("algorithm")) p.algorithm = algorithm_from_string(doc.at("algorithm").get<std::string>());
        get(doc, "seed", p.seed);
        if (doc.contains("tree")) {
            const auto& t = doc.at("tree");
            get(t, "min_leaf", p.tree.min_leaf);
            get(t, "confidence", p.tree.confidence);
            get(t, "prune", p.tree.prune);
        }
        if (doc.contains("forest")) {
            const auto& f = doc.at("forest");
            get(f, "n_trees", p.forest.n_trees);
            get(f, "feature_sample", p.forest.feature_sample);
            get(f, "bootstrap", p.forest.bootstrap);
        }
        if (doc.contains("knn")) get(doc.at("knn"), "k", p.knn.k);
        if (doc.contains("mlp")) {
            const auto& m = doc.at("mlp");
            get(m, "hidden_units", p.mlp.hidden_units);
            get(m, "epochs", p.mlp.epochs);
            get(m, "learning_rate", p.mlp.learning_rate);
            get(m, "batch_size", p.mlp.batch_size);
        }
        if (doc.contains("svm")) {
            const auto& s = doc.at("svm");
            get(s, "lambda", p.svm.lambda);
            get(s, "epochs", p.svm.epochs);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed training parameters: ") + e.what());
    }
    validate(p);
    return p;
}

FeatureSignature make_signature(const Dataset& ds, const FeatureSubset& subset) {
    ds.check_subset(subset);
    FeatureSignature sig;
    for (auto f : subset) {
        const auto& col = ds.column(f);
        sig.push_back({col.name, col.kind, col.is_nominal() ? col.categories : std::vector<std::string>{}});
    }
    return sig;
}

NumericMatrix numeric_matrix(const BoundFeatures& bound) {
    NumericMatrix m;
    m.rows = bound.rows();
    m.cols = bound.features();
    for (std::size_t f = 0; f < m.cols; ++f)
        if (!bound.is_numeric(f)) throw Error("feature " + std::to_string(f) + " is nominal; encode it first");
    m.data.resize(m.rows * m.cols);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t f = 0; f < m.cols; ++f) m.data[r * m.cols + f] = bound.value(f, r);
    return m;
}

TrainedModel tree_fit(const Dataset& train, const FeatureSubset& subset, const TrainParams& params) {
    validate(params);
    check_training_input(train, subset);
    Stopwatch clock;
    TrainedModel model;
    model.algorithm = Algorithm::tree;
    model.params = params;
    model.params.algorithm = Algorithm::tree;
    model.signature = make_signature(train, subset);
    BoundFeatures x(train, model.signature);
    auto rows = all_rows(train.rows());
    TreeModel tm{grow_tree(x, train.labels(), rows, {params.tree.min_leaf, 0, params.seed})};
    if (params.tree.prune) prune_tree(tm.tree, params.tree.confidence);
    model.learned = std::move(tm);
    model.train_seconds = clock.seconds();
    return model;
}

TrainedModel forest_fit(const Dataset& train, const FeatureSubset& subset, const TrainParams& params) {
    validate(params);
    check_training_input(train, subset);
    Stopwatch clock;
    TrainedModel model;
    model.algorithm = Algorithm::forest;
    model.params = params;
    model.params.algorithm = Algorithm::forest;
    model.signature = make_signature(train, subset);
    BoundFeatures x(train, model.signature);
    const std::size_t d = subset.size();
    const std::size_t sample = params.forest.feature_sample == 0
                                   ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))))
                                   : std::min(params.forest.feature_sample, d);
    const std::size_t n = train.rows();
    ForestModel forest;
    forest.trees.resize(params.forest.n_trees);
    parallel_for(params.forest.n_trees, params.workers, [&](std::size_t t) {
        std::mt19937_64 rng(params.seed + t);
        std::vector<std::size_t> rows;
        if (params.forest.bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            rows.resize(n);
            for (auto& r : rows) r = pick(rng);
        } else {
            rows = all_rows(n);
        }
        forest.trees[t] = grow_tree(x, train.labels(), rows, {params.tree.min_leaf, sample, rng()});
    });
    model.learned = std::move(forest);
    model.train_seconds = clock.seconds();
    return model;
}

TrainedModel nb_fit(const Dataset& train, const FeatureSubset& subset, const TrainParams& params) {
    validate(params);
    check_training_input(train, subset);
    Stopwatch clock;
    TrainedModel model;
    model.algorithm = Algorithm::naive_bayes;
    model.params = params;
    model.params.algorithm = Algorithm::naive_bayes;
    model.signature = make_signature(train, subset);
    BoundFeatures x(train, model.signature);
    const auto labels = train.labels();

    std::array<double, kNumLabels> class_n{};
    for (auto l : labels) class_n[label_index(l)] += 1.0;
    for (auto l : {Label::normal, Label::attack})
        if (class_n[label_index(l)] == 0.0)
            throw Error(std::string("naive Bayes: class '") + (l == Label::attack ? "attack" : "normal") +
                        "' has no training rows");
    NaiveBayesModel nb;
    const double n = static_cast<double>(train.rows());
    for (std::size_t c = 0; c < kNumLabels; ++c) nb.log_prior[c] = std::log(class_n[c] / n);

    for (std::size_t f = 0; f < x.features(); ++f) {
        if (x.is_numeric(f)) {
            GaussianStats g;
            for (std::size_t r = 0; r < x.rows(); ++r) g.mean[label_index(labels[r])] += x.value(f, r);
            for (std::size_t c = 0; c < kNumLabels; ++c) g.mean[c] /= class_n[c];
            for (std::size_t r = 0; r < x.rows(); ++r) {
                const auto c = label_index(labels[r]);
                const double d = x.value(f, r) - g.mean[c];
                g.variance[c] += d * d;
            }
            for (std::size_t c = 0; c < kNumLabels; ++c)
                g.variance[c] = std::max(g.variance[c] / class_n[c], kVarianceFloor);
            nb.features.emplace_back(g);
        } else {
            const std::size_t k = x.categories(f);
            CategoricalStats cat;
            std::array<std::vector<double>, kNumLabels> counts{std::vector<double>(k, 0.0),
                                                               std::vector<double>(k, 0.0)};
            for (std::size_t r = 0; r < x.rows(); ++r) {
                auto code = x.code(f, r);
                if (code != kUnknownCategory) counts[label_index(labels[r])][code] += 1.0;
            }
            for (std::size_t c = 0; c < kNumLabels; ++c) {
                const double denom = class_n[c] + static_cast<double>(k);
                cat.log_prob[c].resize(k);
                for (std::size_t v = 0; v < k; ++v) cat.log_prob[c][v] = std::log((counts[c][v] + 1.0) / denom);
                cat.log_unseen[c] = std::log(1.0 / denom);
            }
            nb.features.emplace_back(std::move(cat));
        }
    }
    model.learned = std::move(nb);
    model.train_seconds = clock.seconds();
    return model;
}

TrainedModel knn_fit(const Dataset& train, const FeatureSubset& subset, const TrainParams& params) {
    validate(params);
    check_training_input(train, subset);
    if (params.knn.k > train.rows())
        throw Error("knn.k = " + std::to_string(params.knn.k) + " exceeds " + std::to_string(train.rows()) +
                    " training rows");
    Stopwatch clock;
    TrainedModel model;
    model.algorithm = Algorithm::knn;
    model.params = params;
    model.params.algorithm = Algorithm::knn;
    model.signature = make_signature(train, subset);
    BoundFeatures x(train, model.signature);
    KnnModel knn;
    knn.k = params.knn.k;
    knn.points = numeric_matrix(x);
    knn.labels.assign(train.labels().begin(), train.labels().end());
    model.learned = std::move(knn);
    model.train_seconds = clock.seconds();
    return model;
}

double MlpNetwork::forward(std::span<const double> x) const {
    double z = params[b2()];
    for (std::size_t h = 0; h < hidden; ++h) {
        double a = params[b1(h)];
        const double* w = params.data() + w1(h, 0);
        for (std::size_t i = 0; i < inputs; ++i) a += w[i] * x[i];
        z += params[w2(h)] * sigmoid(a);
    }
    return sigmoid(z);
}

MlpNetwork mlp_init(std::size_t inputs, std::size_t hidden, std::uint64_t seed) {
    MlpNetwork net;
    net.inputs = inputs;
    net.hidden = hidden;
    net.params.assign(net.size(), 0.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u1(-1.0, 1.0);
    const double l1 = std::sqrt(6.0 / static_cast<double>(inputs + hidden));
    const double l2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
    for (std::size_t h = 0; h < hidden; ++h)
        for (std::size_t i = 0; i < inputs; ++i) net.params[net.w1(h, i)] = l1 * u1(rng);
    for (std::size_t h = 0; h < hidden; ++h) net.params[net.w2(h)] = l2 * u1(rng);
    return net;
}

namespace {

// Adds the per-row gradient of the cross-entropy into `grad`; returns the row loss.
double mlp_accumulate(const MlpNetwork& net, std::span<const double> x, double y, std::vector<double>& hidden_out,
                      std::vector<double>& grad) {
    double z = net.params[net.b2()];
    for (std::size_t h = 0; h < net.hidden; ++h) {
        double a = net.params[net.b1(h)];
        const double* w = net.params.data() + net.w1(h, 0);
        for (std::size_t i = 0; i < net.inputs; ++i) a += w[i] * x[i];
        hidden_out[h] = sigmoid(a);
        z += net.params[net.w2(h)] * hidden_out[h];
    }
    const double dz = sigmoid(z) - y;
    grad[net.b2()] += dz;
    for (std::size_t h = 0; h < net.hidden; ++h) {
        const double s = hidden_out[h];
        grad[net.w2(h)] += dz * s;
        const double da = dz * net.params[net.w2(h)] * s * (1.0 - s);
        grad[net.b1(h)] += da;
        double* g = grad.data() + net.w1(h, 0);
        for (std::size_t i = 0; i < net.inputs; ++i) g[i] += da * x[i];
    }
    return softplus(z) - y * z;
}

}  // namespace

double mlp_loss(const MlpNetwork& net, const NumericMatrix& x, std::span<const Label> y) {
    if (x.rows == 0 || x.rows != y.size()) throw Error("mlp_loss: bad input shape");
    double total = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
        auto row = x.row(r);
        double z = net.params[net.b2()];
        for (std::size_t h = 0; h < net.hidden; ++h) {
            double a = net.params[net.b1(h)];
            for (std::size_t i = 0; i < net.inputs; ++i) a += net.params[net.w1(h, i)] * row[i];
            z += net.params[net.w2(h)] * sigmoid(a);
        }
        total += softplus(z) - target(y[r]) * z;
    }
    return total / static_cast<double>(x.rows);
}

std::vector<double> mlp_gradient(const MlpNetwork& net, const NumericMatrix& x, std::span<const Label> y) {
    if (x.rows == 0 || x.rows != y.size()) throw Error("mlp_gradient: bad input shape");
    std::vector<double> grad(net.size(), 0.0);
    std::vector<double> hidden(net.hidden);
    for (std::size_t r = 0; r < x.rows; ++r) mlp_accumulate(net, x.row(r), target(y[r]), hidden, grad);
    for (auto& g : grad) g /= static_cast<double>(x.rows);
    return grad;
}

TrainedModel mlp_fit(const Dataset& train, const FeatureSubset& subset, const TrainParams& params) {
    validate(params);
    check_training_input(train, subset);
    Stopwatch clock;
    TrainedModel model;
    model.algorithm = Algorithm::mlp;
    model.params = params;
    model.params.algorithm = Algorithm::mlp;
    model.signature = make_signature(train, subset);
    const auto x = numeric_matrix(BoundFeatures(train, model.signature));
    const auto labels = train.labels();

    MlpModel mlp{mlp_init(x.cols, params.mlp.hidden_units, params.seed), {}};
    auto& net = mlp.network;
    std::mt19937_64 rng(params.seed ^ 0x9e3779b97f4a7c15ULL);
    auto order = all_rows(x.rows);
    std::vector<double> grad(net.size());
    std::vector<double> hidden(net.hidden);
    const std::size_t batch = params.mlp.batch_size;
    for (std::size_t epoch = 0; epoch < params.mlp.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = start; i < end; ++i)
                epoch_loss += mlp_accumulate(net, x.row(order[i]), target(labels[order[i]]), hidden, grad);
            const double step = params.mlp.learning_rate / static_cast<double>(end - start);
            for (std::size_t p = 0; p < grad.size(); ++p) net.params[p] -= step * grad[p];
        }
        epoch_loss /= static_cast<double>(x.rows);
        if (!std::isfinite(epoch_loss)) throw Error("mlp diverged: non-finite loss at epoch " + std::to_string(epoch + 1));
        mlp.loss_history.push_back(epoch_loss);
    }
    model.learned = std::move(mlp);
    model.train_seconds = clock.seconds();
    return model;
}

double svm_objective(const SvmModel& m, const NumericMatrix& x, std::span<const Label> y, double lambda) {
    if (x.rows == 0 || x.rows != y.size()) throw Error("svm_objective: bad input shape");
    double hinge = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
        auto row = x.row(r);
        double s = m.bias;
        for (std::size_t j = 0; j < row.size(); ++j) s += m.weights[j] * row[j];
        hinge += std::max(0.0, 1.0 - signed_target(y[r]) * s);
    }
    double norm2 = 0.0;
    for (double w : m.weights) norm2 += w * w;
    return lambda * norm2 + hinge / static_cast<double>(x.rows);
}

TrainedModel svm_fit(const Dataset& train, const FeatureSubset& subset, const TrainParams& params) {
    validate(params);
    check_training_input(train, subset);
    Stopwatch clock;
    TrainedModel model;
    model.algorithm = Algorithm::linear_svm;
    model.params = params;
    model.params.algorithm = Algorithm::linear_svm;
    model.signature = make_signature(train, subset);
    const auto x = numeric_matrix(BoundFeatures(train, model.signature));
    const auto labels = train.labels();
    const double lambda = params.svm.lambda;
    const double radius = 1.0 / std::sqrt(lambda);

    std::vector<double> w(x.cols, 0.0);
    double b = 0.0;
    SvmModel svm;
    svm.weights.assign(x.cols, 0.0);
    std::mt19937_64 rng(params.seed);
    auto order = all_rows(x.rows);
    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < params.svm.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<double> avg_w(x.cols, 0.0);
        double avg_b = 0.0;
        std::size_t steps = 0;
        for (auto r : order) {
            ++t;
            auto row = x.row(r);
            const double y = signed_target(labels[r]);
            double s = b;
            for (std::size_t j = 0; j < row.size(); ++j) s += w[j] * row[j];
            // Pegasos-style step for lambda*|w|^2; the bias is unregularized
            // and takes a 1/sqrt(t) step.
            const double eta = 1.0 / (2.0 * lambda * static_cast<double>(t));
            const double shrink = 1.0 - 2.0 * lambda * eta;
            for (auto& wj : w) wj *= shrink;
            if (y * s < 1.0) {
                for (std::size_t j = 0; j < row.size(); ++j) w[j] += eta * y * row[j];
                b += y / std::sqrt(static_cast<double>(t));
            }
            double norm2 = 0.0;
            for (double wj : w) norm2 += wj * wj;
            if (norm2 > radius * radius) {
                const double scale = radius / std::sqrt(norm2);
                for (auto& wj : w) wj *= scale;
            }
            ++steps;
            const double inv = 1.0 / static_cast<double>(steps);
            for (std::size_t j = 0; j < w.size(); ++j) avg_w[j] += (w[j] - avg_w[j]) * inv;
            avg_b += (b - avg_b) * inv;
        }
        SvmModel candidate{avg_w, avg_b, {}};
        const double obj = svm_objective(candidate, x, labels, lambda);
        if (!std::isfinite(obj)) throw Error("svm diverged: non-finite objective at epoch " + std::to_string(epoch + 1));
        // Retain the best epoch average seen so far.
        if (svm.objective_history.empty() || obj <= svm.objective_history.back()) {
            svm.weights = std::move(avg_w);
            svm.bias = avg_b;
            svm.objective_history.push_back(obj);
        } else {
            svm.objective_history.push_back(svm.objective_history.back());
        }
    }
    model.learned = std::move(svm);
    model.train_seconds = clock.seconds();
    return model;
}

TrainedModel fit_model(const Dataset& train, const FeatureSubset& subset, const TrainParams& params) {
    switch (params.algorithm) {
        case Algorithm::tree: return tree_fit(train, subset, params);
        case Algorithm::forest: return forest_fit(train, subset, params);
        case Algorithm::naive_bayes: return nb_fit(train, subset, params);
        case Algorithm::knn: return knn_fit(train, subset, params);
        case Algorithm::mlp: return mlp_fit(train, subset, params);
        case Algorithm::linear_svm: return svm_fit(train, subset, params);
    }
    throw Error("unknown algorithm");
}

std::vector<Label> predict(const TrainedModel& model, const Dataset& ds) {
    if (model.signature.empty()) throw Error("model has an empty feature signature");
    BoundFeatures x(ds, model.signature);
    std::vector<Label> out(ds.rows());
    switch (model.algorithm) {
        case Algorithm::tree: {
            const auto& tree = learned_as<TreeModel>(model).tree;
            for (std::size_t r = 0; r < ds.rows(); ++r) out[r] = tree.predict(x, r);
            break;
        }
        case Algorithm::forest: {
            const auto& forest = learned_as<ForestModel>(model);
            for (std::size_t r = 0; r < ds.rows(); ++r) {
                std::size_t attack = 0;
                for (const auto& t : forest.trees) attack += t.predict(x, r) == Label::attack ? 1 : 0;
                out[r] = vote(attack, forest.trees.size() - attack);
            }
            break;
        }
        case Algorithm::naive_bayes: {
            const auto& nb = learned_as<NaiveBayesModel>(model);
            for (std::size_t r = 0; r < ds.rows(); ++r) {
                auto lp = nb_log_joint(nb, x, r);
                out[r] = lp[label_index(Label::attack)] >= lp[label_index(Label::normal)] ? Label::attack
                                                                                          : Label::normal;
            }
            break;
        }
        case Algorithm::knn: out = knn_vote(learned_as<KnnModel>(model), numeric_matrix(x), model.params.workers); break;
        case Algorithm::mlp: {
            const auto& net = learned_as<MlpModel>(model).network;
            const auto m = numeric_matrix(x);
            for (std::size_t r = 0; r < m.rows; ++r) out[r] = net.forward(m.row(r)) >= 0.5 ? Label::attack : Label::normal;
            break;
        }
        case Algorithm::linear_svm: {
            const auto& svm = learned_as<SvmModel>(model);
            const auto m = numeric_matrix(x);
            for (std::size_t r = 0; r < m.rows; ++r) {
                auto row = m.row(r);
                double s = svm.bias;
                for (std::size_t j = 0; j < row.size(); ++j) s += svm.weights[j] * row[j];
                out[r] = s >= 0.0 ? Label::attack : Label::normal;
            }
            break;
        }
    }
    return out;
}

std::vector<Label> tree_predict(const TrainedModel& model, const Dataset& ds) {
    if (model.algorithm != Algorithm::tree) throw Error("tree_predict called on a non-tree model");
    return predict(model, ds);
}

std::vector<Label> knn_predict(const Dataset& train, const FeatureSubset& subset, const Dataset& test,
                               const TrainParams& params) {
    return predict(knn_fit(train, subset, params), test);
}

std::vector<std::array<double, kNumLabels>> nb_posteriors(const TrainedModel& model, const Dataset& ds) {
    const auto& nb = learned_as<NaiveBayesModel>(model);
    BoundFeatures x(ds, model.signature);
    std::vector<std::array<double, kNumLabels>> out(ds.rows());
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        auto lp = nb_log_joint(nb, x, r);
        const double m = std::max(lp[0], lp[1]);
        const double e0 = std::exp(lp[0] - m);
        const double e1 = std::exp(lp[1] - m);
        out[r] = {e0 / (e0 + e1), e1 / (e0 + e1)};
    }
    return out;
}

}  // namespace fsel
