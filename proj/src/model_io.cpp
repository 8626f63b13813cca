#include <string>

#include "fselids/classify.hpp"

namespace fsel {

namespace {

using nlohmann::json;

std::string_view node_kind_name(TreeNode::Kind k) {
    switch (k) {
        case TreeNode::Kind::leaf: return "leaf";
        case TreeNode::Kind::numeric_split: return "numeric";
        case TreeNode::Kind::nominal_split: return "nominal";
    }
    return "?";
}

TreeNode::Kind node_kind_from(const std::string& s) {
    if (s == "leaf") return TreeNode::Kind::leaf;
    if (s == "numeric") return TreeNode::Kind::numeric_split;
    if (s == "nominal") return TreeNode::Kind::nominal_split;
    throw Error("unknown tree node kind '" + s + "'");
}

json tree_to_json(const DecisionTree& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
        json j{{"kind", node_kind_name(n.kind)},
               {"counts", n.class_counts},
               {"prediction", label_index(n.prediction)}};
        if (!n.is_leaf()) {
            j["feature"] = n.feature;
            j["children"] = n.children;
            if (n.kind == TreeNode::Kind::numeric_split) j["threshold"] = n.threshold;
            else j["fallback"] = n.fallback_child;
        }
        nodes.push_back(std::move(j));
    }
    return nodes;
}

DecisionTree tree_from_json(const json& doc, std::size_t features) {
    DecisionTree tree;
    for (const auto& j : doc) {
        TreeNode n;
        n.kind = node_kind_from(j.at("kind").get<std::string>());
        n.class_counts = j.at("counts").get<std::array<double, kNumLabels>>();
        n.prediction = j.at("prediction").get<int>() == 1 ? Label::attack : Label::normal;
        if (!n.is_leaf()) {
            n.feature = j.at("feature").get<std::size_t>();
            n.children = j.at("children").get<std::vector<std::size_t>>();
            if (n.kind == TreeNode::Kind::numeric_split) n.threshold = j.at("threshold").get<double>();
            else n.fallback_child = j.at("fallback").get<std::size_t>();
            if (n.feature >= features) throw Error("tree node references feature outside the signature");
            if (n.children.size() < 2) throw Error("internal tree node needs at least 2 children");
            if (n.fallback_child >= n.children.size()) throw Error("tree fallback child out of range");
        }
        tree.nodes.push_back(std::move(n));
    }
    if (tree.nodes.empty()) throw Error("tree has no nodes");
    for (const auto& n : tree.nodes)
        for (auto c : n.children)
            if (c >= tree.nodes.size()) throw Error("tree child index out of range");
    return tree;
}

json matrix_to_json(const NumericMatrix& m) { return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}}; }

NumericMatrix matrix_from_json(const json& j) {
    NumericMatrix m{j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                    j.at("data").get<std::vector<double>>()};
    if (m.data.size() != m.rows * m.cols) throw Error("matrix data size does not match its shape");
    return m;
}

json learned_to_json(const LearnedParameters& learned) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, TreeModel>) {
                return {{"tree", tree_to_json(p.tree)}};
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                json trees = json::array();
                for (const auto& t : p.trees) trees.push_back(tree_to_json(t));
                return {{"trees", trees}};
            } else if constexpr (std::is_same_v<T, NaiveBayesModel>) {
                json feats = json::array();
                for (const auto& f : p.features) {
                    if (const auto* g = std::get_if<GaussianStats>(&f))
                        feats.push_back({{"type", "gaussian"}, {"mean", g->mean}, {"variance", g->variance}});
                    else {
                        const auto& c = std::get<CategoricalStats>(f);
                        feats.push_back(
                            {{"type", "categorical"}, {"log_prob", c.log_prob}, {"log_unseen", c.log_unseen}});
                    }
                }
                return {{"log_prior", p.log_prior}, {"features", feats}};
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                std::vector<int> labels;
                for (auto l : p.labels) labels.push_back(static_cast<int>(label_index(l)));
                return {{"k", p.k}, {"points", matrix_to_json(p.points)}, {"labels", labels}};
            } else if constexpr (std::is_same_v<T, MlpModel>) {
                return {{"inputs", p.network.inputs},
                        {"hidden", p.network.hidden},
                        {"params", p.network.params},
                        {"loss_history", p.loss_history}};
            } else {
                return {{"weights", p.weights}, {"bias", p.bias}, {"objective_history", p.objective_history}};
            }
        },
        learned);
}

LearnedParameters learned_from_json(Algorithm algo, const json& j, std::size_t features) {
    switch (algo) {
        case Algorithm::tree: return TreeModel{tree_from_json(j.at("tree"), features)};
        case Algorithm::forest: {
            ForestModel f;
            for (const auto& t : j.at("trees")) f.trees.push_back(tree_from_json(t, features));
            if (f.trees.empty()) throw Error("forest has no trees");
            return f;
        }
        case Algorithm::naive_bayes: {
            NaiveBayesModel nb;
            nb.log_prior = j.at("log_prior").get<std::array<double, kNumLabels>>();
            for (const auto& f : j.at("features")) {
                if (f.at("type") == "gaussian") {
                    GaussianStats g;
                    g.mean = f.at("mean").get<std::array<double, kNumLabels>>();
                    g.variance = f.at("variance").get<std::array<double, kNumLabels>>();
                    nb.features.emplace_back(g);
                } else {
                    CategoricalStats c;
                    c.log_prob = f.at("log_prob").get<std::array<std::vector<double>, kNumLabels>>();
                    c.log_unseen = f.at("log_unseen").get<std::array<double, kNumLabels>>();
                    nb.features.emplace_back(std::move(c));
                }
            }
            if (nb.features.size() != features) throw Error("naive Bayes feature count does not match signature");
            return nb;
        }
        case Algorithm::knn: {
            KnnModel k;
            k.k = j.at("k").get<std::size_t>();
            k.points = matrix_from_json(j.at("points"));
            for (int l : j.at("labels").get<std::vector<int>>()) k.labels.push_back(l == 1 ? Label::attack : Label::normal);
            if (k.labels.size() != k.points.rows || k.points.cols != features || k.k < 1 || k.k > k.points.rows)
                throw Error("knn model shape is inconsistent");
            return k;
        }
        case Algorithm::mlp: {
            MlpModel m;
            m.network.inputs = j.at("inputs").get<std::size_t>();
            m.network.hidden = j.at("hidden").get<std::size_t>();
            m.network.params = j.at("params").get<std::vector<double>>();
            m.loss_history = j.at("loss_history").get<std::vector<double>>();
            if (m.network.params.size() != m.network.size() || m.network.inputs != features)
                throw Error("mlp parameter vector has the wrong size");
            return m;
        }
        case Algorithm::linear_svm: {
            SvmModel s;
            s.weights = j.at("weights").get<std::vector<double>>();
            s.bias = j.at("bias").get<double>();
            s.objective_history = j.at("objective_history").get<std::vector<double>>();
            if (s.weights.size() != features) throw Error("svm weight vector has the wrong size");
            return s;
        }
    }
    throw Error("unknown algorithm");
}

}  // namespace

nlohmann::json to_json(const TrainedModel& model) {
    json sig = json::array();
    for (const auto& f : model.signature) {
        json e{{"name", f.name}, {"kind", to_string(f.kind)}};
        if (f.kind == FeatureKind::nominal) e["categories"] = f.categories;
        sig.push_back(std::move(e));
    }
    return {{"format", "fselids.trained_model"},
            {"version", kModelFormatVersion},
            {"algorithm", to_string(model.algorithm)},
            {"params", to_json(model.params)},
            {"signature", sig},
            {"train_seconds", model.train_seconds},
            {"learned", learned_to_json(model.learned)}};
}

TrainedModel trained_model_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format").get<std::string>() != "fselids.trained_model")
            throw Error("not a trained model document");
        if (doc.at("version").get<int>() != kModelFormatVersion)
            throw Error("unsupported model version " + doc.at("version").dump());
        TrainedModel m;
        m.algorithm = algorithm_from_string(doc.at("algorithm").get<std::string>());
        m.params = train_params_from_json(doc.at("params"));
        for (const auto& e : doc.at("signature")) {
            FeatureSpec f;
            f.name = e.at("name").get<std::string>();
            f.kind = feature_kind_from_string(e.at("kind").get<std::string>());
            if (f.kind != FeatureKind::numeric && f.kind != FeatureKind::nominal)
                throw Error("signature feature '" + f.name + "' has kind " + std::string(to_string(f.kind)));
            if (f.kind == FeatureKind::nominal) f.categories = e.at("categories").get<std::vector<std::string>>();
            m.signature.push_back(std::move(f));
        }
        if (m.signature.empty()) throw Error("model signature is empty");
        m.train_seconds = doc.at("train_seconds").get<double>();
        m.learned = learned_from_json(m.algorithm, doc.at("learned"), m.signature.size());
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed model document: ") + e.what());
    }
}

}  // namespace fsel
