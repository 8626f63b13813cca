#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include <boost/math/distributions/normal.hpp>

#include "fselids/classify.hpp"
#include "fselids/entropy.hpp"

namespace fsel {

namespace {

constexpr double kMinGain = 1e-10;

Label majority(const std::array<double, kNumLabels>& counts) {
    return counts[label_index(Label::normal)] > counts[label_index(Label::attack)] ? Label::normal : Label::attack;
}

struct SplitChoice {
    bool valid = false;
    std::size_t feature = 0;
    bool numeric = false;
    double threshold = 0.0;
    double gain = 0.0;
    double ratio = 0.0;
};

SplitChoice best_numeric_split(const BoundFeatures& x, std::span<const Label> labels,
                               const std::vector<std::size_t>& rows, std::size_t feature, std::size_t min_leaf,
                               double parent_entropy) {
    std::vector<std::pair<double, Label>> pv;
    pv.reserve(rows.size());
    for (auto r : rows) pv.emplace_back(x.value(feature, r), labels[r]);
    std::sort(pv.begin(), pv.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    const std::size_t n = pv.size();
    std::array<double, kNumLabels> total{};
    for (const auto& p : pv) total[label_index(p.second)] += 1.0;
    std::array<double, kNumLabels> left{};
    double best_gain = -1.0;
    std::size_t best_i = n;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        left[label_index(pv[i].second)] += 1.0;
        if (pv[i].first == pv[i + 1].first) continue;
        const std::size_t nl = i + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        std::array<double, kNumLabels> right{total[0] - left[0], total[1] - left[1]};
        const double gain = parent_entropy -
                            (static_cast<double>(nl) / static_cast<double>(n)) * entropy_from_counts(left) -
                            (static_cast<double>(nr) / static_cast<double>(n)) * entropy_from_counts(right);
        if (gain > best_gain) {
            best_gain = gain;
            best_i = i;
        }
    }
    SplitChoice s;
    if (best_i == n || best_gain <= kMinGain) return s;
    const double lo = pv[best_i].first;
    const double hi = pv[best_i + 1].first;
    double cut = lo + (hi - lo) / 2.0;
    if (!(cut < hi)) cut = lo;
    const std::array<double, 2> sizes{static_cast<double>(best_i + 1), static_cast<double>(n - best_i - 1)};
    s.valid = true;
    s.feature = feature;
    s.numeric = true;
    s.threshold = cut;
    s.gain = best_gain;
    s.ratio = best_gain / entropy_from_counts(sizes);
    return s;
}

// Per-category class counts with unseen codes folded into the largest branch.
std::vector<std::array<double, kNumLabels>> nominal_counts(const BoundFeatures& x, std::span<const Label> labels,
                                                          const std::vector<std::size_t>& rows,
                                                          std::size_t feature, std::size_t& largest) {
    const std::size_t k = x.categories(feature);
    std::vector<std::array<double, kNumLabels>> counts(k);
    std::array<double, kNumLabels> unseen{};
    for (auto r : rows) {
        auto code = x.code(feature, r);
        if (code == kUnknownCategory)
            unseen[label_index(labels[r])] += 1.0;
        else
            counts[code][label_index(labels[r])] += 1.0;
    }
    largest = 0;
    double largest_n = -1.0;
    for (std::size_t c = 0; c < k; ++c) {
        const double nc = counts[c][0] + counts[c][1];
        if (nc > largest_n) {
            largest_n = nc;
            largest = c;
        }
    }
    if (k > 0) {
        counts[largest][0] += unseen[0];
        counts[largest][1] += unseen[1];
    }
    return counts;
}

SplitChoice best_nominal_split(const BoundFeatures& x, std::span<const Label> labels,
                               const std::vector<std::size_t>& rows, std::size_t feature, std::size_t min_leaf,
                               double parent_entropy) {
    SplitChoice s;
    if (x.categories(feature) < 2) return s;
    std::size_t largest = 0;
    auto counts = nominal_counts(x, labels, rows, feature, largest);
    const double n = static_cast<double>(rows.size());
    std::size_t big_branches = 0;
    double conditional = 0.0;
    std::vector<double> sizes;
    for (const auto& c : counts) {
        const double nc = c[0] + c[1];
        if (nc >= static_cast<double>(min_leaf) && nc > 0.0) ++big_branches;
        if (nc > 0.0) {
            sizes.push_back(nc);
            conditional += (nc / n) * entropy_from_counts(c);
        }
    }
    if (big_branches < 2) return s;
    const double gain = parent_entropy - conditional;
    if (gain <= kMinGain) return s;
    s.valid = true;
    s.feature = feature;
    s.numeric = false;
    s.gain = gain;
    s.ratio = gain / entropy_from_counts(sizes);
    return s;
}

struct PendingNode {
    std::size_t index;
    std::vector<std::size_t> rows;
    Label parent_prediction;
};

}  // namespace

BoundFeatures::BoundFeatures(const Dataset& ds, const FeatureSignature& signature) : rows_(ds.rows()) {
    columns_.reserve(signature.size());
    for (const auto& spec : signature) {
        auto idx = ds.find(spec.name);
        if (!idx) throw Error("signature mismatch: dataset has no feature '" + spec.name + "'");
        const Column& col = ds.column(*idx);
        if (col.kind != spec.kind)
            throw Error("signature mismatch: feature '" + spec.name + "' is " + std::string(to_string(col.kind)) +
                        ", model expects " + std::string(to_string(spec.kind)));
        columns_.push_back(&col);
        std::vector<std::uint32_t> table;
        if (col.is_nominal()) {
            std::unordered_map<std::string_view, std::uint32_t> pos;
            for (std::size_t i = 0; i < spec.categories.size(); ++i)
                pos.emplace(spec.categories[i], static_cast<std::uint32_t>(i));
            table.assign(col.categories.size(), kUnknownCategory);
            for (std::size_t i = 0; i < col.categories.size(); ++i)
                if (auto it = pos.find(col.categories[i]); it != pos.end()) table[i] = it->second;
        }
        remap_.push_back(std::move(table));
        category_counts_.push_back(spec.categories.size());
    }
}

std::uint32_t BoundFeatures::code(std::size_t feature, std::size_t row) const {
    const auto raw = columns_[feature]->codes[row];
    if (raw == kUnknownCategory) return kUnknownCategory;
    return remap_[feature][raw];
}

std::size_t DecisionTree::leaf_for(const BoundFeatures& x, std::size_t row) const {
    std::size_t at = 0;
    while (!nodes[at].is_leaf()) {
        const auto& node = nodes[at];
        if (node.kind == TreeNode::Kind::numeric_split) {
            at = node.children[x.value(node.feature, row) <= node.threshold ? 0 : 1];
        } else {
            auto code = x.code(node.feature, row);
            at = (code == kUnknownCategory || code >= node.children.size()) ? node.children[node.fallback_child]
                                                                              : node.children[code];
        }
    }
    return at;
}

std::size_t DecisionTree::depth() const {
    if (nodes.empty()) return 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::size_t best = 0;
    while (!stack.empty()) {
        auto [at, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        for (auto c : nodes[at].children) stack.emplace_back(c, d + 1);
    }
    return best;
}

std::size_t DecisionTree::leaves() const {
    std::size_t n = 0;
    std::vector<std::size_t> stack{0};
    while (!stack.empty() && !nodes.empty()) {
        auto at = stack.back();
        stack.pop_back();
        if (nodes[at].is_leaf()) ++n;
        for (auto c : nodes[at].children) stack.push_back(c);
    }
    return n;
}

DecisionTree grow_tree(const BoundFeatures& x, std::span<const Label> labels, std::span<const std::size_t> rows,
                       const TreeGrowOptions& options) {
    if (rows.empty()) throw Error("cannot grow a tree on zero rows");
    const std::size_t min_leaf = std::max<std::size_t>(1, options.min_leaf);
    const std::size_t nfeat = x.features();
    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> pool(nfeat);
    std::iota(pool.begin(), pool.end(), 0);

    DecisionTree tree;
    tree.nodes.emplace_back();
    std::vector<PendingNode> stack;
    stack.push_back({0, {rows.begin(), rows.end()}, Label::attack});
    while (!stack.empty()) {
        PendingNode work = std::move(stack.back());
        stack.pop_back();
        std::array<double, kNumLabels> counts{};
        for (auto r : work.rows) counts[label_index(labels[r])] += 1.0;
        {
            auto& node = tree.nodes[work.index];
            node.class_counts = counts;
            node.prediction = work.rows.empty() ? work.parent_prediction : majority(counts);
        }
        const bool pure = counts[0] == 0.0 || counts[1] == 0.0;
        if (work.rows.empty() || pure || work.rows.size() < min_leaf || work.rows.size() < 2 * min_leaf) continue;

        std::vector<std::size_t> candidates;
        if (options.feature_sample > 0 && options.feature_sample < nfeat) {
            for (std::size_t i = 0; i < options.feature_sample; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, nfeat - 1);
                std::swap(pool[i], pool[pick(rng)]);
            }
            candidates.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(options.feature_sample));
            std::sort(candidates.begin(), candidates.end());
        } else {
            candidates = pool;
            std::sort(candidates.begin(), candidates.end());
        }

        const double parent_entropy = entropy_from_counts(counts);
        SplitChoice best;
        for (auto f : candidates) {
            SplitChoice s = x.is_numeric(f) ? best_numeric_split(x, labels, work.rows, f, min_leaf, parent_entropy)
                                            : best_nominal_split(x, labels, work.rows, f, min_leaf, parent_entropy);
            if (s.valid && (!best.valid || s.ratio > best.ratio)) best = s;
        }
        if (!best.valid) continue;

        std::vector<std::vector<std::size_t>> parts;
        std::size_t fallback = 0;
        if (best.numeric) {
            parts.resize(2);
            for (auto r : work.rows) parts[x.value(best.feature, r) <= best.threshold ? 0 : 1].push_back(r);
        } else {
            nominal_counts(x, labels, work.rows, best.feature, fallback);
            parts.resize(x.categories(best.feature));
            for (auto r : work.rows) {
                auto code = x.code(best.feature, r);
                parts[code == kUnknownCategory ? fallback : code].push_back(r);
            }
        }
        const Label here = tree.nodes[work.index].prediction;
        std::vector<std::size_t> child_ids;
        for (std::size_t c = 0; c < parts.size(); ++c) {
            child_ids.push_back(tree.nodes.size());
            tree.nodes.emplace_back();
        }
        auto& node = tree.nodes[work.index];
        node.kind = best.numeric ? TreeNode::Kind::numeric_split : TreeNode::Kind::nominal_split;
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.children = child_ids;
        node.fallback_child = fallback;
        // Reverse push keeps node numbering close to a depth-first layout.
        for (std::size_t c = parts.size(); c-- > 0;) stack.push_back({child_ids[c], std::move(parts[c]), here});
    }
    return tree;
}

double pessimistic_extra_errors(double n, double e, double confidence) {
    if (n <= 0.0) return 0.0;
    if (e < 1.0) {
        const double base = n * (1.0 - std::pow(confidence, 1.0 / n));
        if (e == 0.0) return base;
        return base + e * (pessimistic_extra_errors(n, 1.0, confidence) - base);
    }
    if (e + 0.5 >= n) return std::max(n - e, 0.0);
    const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - confidence);
    const double f = (e + 0.5) / n;
    const double r =
        (f + z * z / (2.0 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) / (1.0 + z * z / n);
    return r * n - e;
}

namespace {

double leaf_estimate(const TreeNode& node, double confidence) {
    const double n = node.class_counts[0] + node.class_counts[1];
    const double e = n - std::max(node.class_counts[0], node.class_counts[1]);
    return e + pessimistic_extra_errors(n, e, confidence);
}

double prune_node(DecisionTree& tree, std::size_t at, double confidence) {
    auto& node = tree.nodes[at];
    if (node.is_leaf()) return leaf_estimate(node, confidence);
    double subtree = 0.0;
    for (auto c : std::vector<std::size_t>(node.children)) subtree += prune_node(tree, c, confidence);
    auto& again = tree.nodes[at];
    const double as_leaf = leaf_estimate(again, confidence);
    if (as_leaf <= subtree + 0.1) {
        again.kind = TreeNode::Kind::leaf;
        again.children.clear();
        return as_leaf;
    }
    return subtree;
}

}  // namespace

void prune_tree(DecisionTree& tree, double confidence) {
    if (!(confidence > 0.0 && confidence <= 0.5)) throw Error("pruning confidence must lie in (0, 0.5]");
    if (tree.nodes.empty()) return;
    prune_node(tree, 0, confidence);
    // Drop nodes no longer reachable from the root.
    DecisionTree compact;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    compact.nodes.push_back(tree.nodes[0]);
    while (!stack.empty()) {
        auto [old_at, new_at] = stack.back();
        stack.pop_back();
        std::vector<std::size_t> new_children;
        for (auto c : tree.nodes[old_at].children) {
            new_children.push_back(compact.nodes.size());
            compact.nodes.push_back(tree.nodes[c]);
            stack.emplace_back(c, new_children.back());
        }
        compact.nodes[new_at].children = std::move(new_children);
    }
    tree = std::move(compact);
}

}  // namespace fsel
