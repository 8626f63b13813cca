#include "fselids/fselect.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "fselids/entropy.hpp"

namespace fsel {

namespace {

// Value id per row for an entropy scorer: nominal codes (unseen codes share
// one extra id) or discretized bins.
std::vector<std::uint32_t> value_ids(const Dataset& ds, std::size_t feature, const DiscretizationPlan& bins,
                                     std::size_t& cardinality) {
    const auto& col = ds.column(feature);
    std::vector<std::uint32_t> ids(ds.rows());
    if (col.is_nominal()) {
        cardinality = col.categories.size() + 1;
        for (std::size_t r = 0; r < ds.rows(); ++r)
            ids[r] = col.codes[r] == kUnknownCategory ? static_cast<std::uint32_t>(col.categories.size()) : col.codes[r];
        return ids;
    }
    const auto* bb = bins.find(col.name);
    if (!bb) throw Error("numeric feature '" + col.name + "' is not covered by the discretization plan");
    cardinality = bb->bins();
    for (std::size_t r = 0; r < ds.rows(); ++r) ids[r] = bb->bin_of(col.values[r]);
    return ids;
}

struct EntropyTerms {
    double class_entropy = 0.0;
    double conditional = 0.0;
    double feature_entropy = 0.0;
};

EntropyTerms entropy_terms(const Dataset& ds, std::size_t feature, const DiscretizationPlan& bins) {
    if (ds.empty()) throw Error("entropy scorer on an empty dataset");
    std::size_t k = 0;
    auto ids = value_ids(ds, feature, bins, k);
    std::vector<std::array<double, kNumLabels>> joint(k);
    std::array<double, kNumLabels> cls{};
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        joint[ids[r]][label_index(ds.label(r))] += 1.0;
        cls[label_index(ds.label(r))] += 1.0;
    }
    const double n = static_cast<double>(ds.rows());
    EntropyTerms t;
    t.class_entropy = entropy_from_counts(cls);
    std::vector<double> marginal;
    for (const auto& j : joint) {
        const double nv = j[0] + j[1];
        if (nv == 0.0) continue;
        marginal.push_back(nv);
        t.conditional += (nv / n) * entropy_from_counts(j);
    }
    t.feature_entropy = entropy_from_counts(marginal);
    return t;
}

}  // namespace

double entropy(std::span<const std::uint32_t> class_ids) {
    if (class_ids.empty()) throw Error("entropy of an empty sequence");
    std::map<std::uint32_t, double> counts;
    for (auto c : class_ids) counts[c] += 1.0;
    std::vector<double> v;
    for (const auto& [_, c] : counts) v.push_back(c);
    return entropy_from_counts(v);
}

double entropy(std::span<const Label> labels) {
    if (labels.empty()) throw Error("entropy of an empty sequence");
    std::array<double, kNumLabels> counts{};
    for (auto l : labels) counts[label_index(l)] += 1.0;
    return entropy_from_counts(counts);
}

RankedScores make_ranking(std::vector<FeatureScore> scores) {
    for (const auto& s : scores)
        if (!std::isfinite(s.score)) throw Error("non-finite score for feature " + std::to_string(s.feature));
    std::sort(scores.begin(), scores.end(), [](const FeatureScore& a, const FeatureScore& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.feature < b.feature;
    });
    return {std::move(scores)};
}

double info_gain(const Dataset& ds, std::size_t feature, const DiscretizationPlan& bins) {
    auto t = entropy_terms(ds, feature, bins);
    return t.class_entropy - t.conditional;
}

double gain_ratio(const Dataset& ds, std::size_t feature, const DiscretizationPlan& bins) {
    auto t = entropy_terms(ds, feature, bins);
    if (t.feature_entropy <= 0.0) return 0.0;
    return (t.class_entropy - t.conditional) / t.feature_entropy;
}

RankedScores info_gain_ranking(const Dataset& ds, const DiscretizationPlan& bins) {
    std::vector<FeatureScore> s;
    for (std::size_t f = 0; f < ds.features(); ++f) s.push_back({f, info_gain(ds, f, bins)});
    return make_ranking(std::move(s));
}

RankedScores gain_ratio_ranking(const Dataset& ds, const DiscretizationPlan& bins) {
    std::vector<FeatureScore> s;
    for (std::size_t f = 0; f < ds.features(); ++f) s.push_back({f, gain_ratio(ds, f, bins)});
    return make_ranking(std::move(s));
}

std::vector<std::size_t> relief_sample_rows(std::size_t n, std::size_t samples, std::uint64_t seed) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    if (samples >= n) return rows;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(rows[i], rows[pick(rng)]);
    }
    rows.resize(samples);
    return rows;
}

RankedScores relief_weights(const Dataset& ds, std::size_t samples, std::size_t neighbors, std::uint64_t seed,
                            std::size_t workers) {
    if (samples < 1) throw Error("relief needs at least one sampled instance");
    if (neighbors < 1) throw Error("relief needs at least one neighbour");
    const auto dist = class_distribution(ds);
    for (auto l : {Label::normal, Label::attack})
        if (dist.count(l) < neighbors + 1)
            throw Error(std::string("relief: class '") + (l == Label::attack ? "attack" : "normal") + "' has " +
                        std::to_string(dist.count(l)) + " rows, needs at least " + std::to_string(neighbors + 1));

    const std::size_t n = ds.rows();
    const std::size_t d = ds.features();
    // Column-major copy of the data. diff(a, b) = min(|a - b|, cap) / den is
    // |a - b| / range for numeric features and the 0/1 mismatch for nominal
    // codes (distinct integer codes differ by at least 1).
    std::vector<std::vector<double>> z(d, std::vector<double>(n));
    std::vector<double> cap(d, 1.0), den(d, 1.0);
    for (std::size_t f = 0; f < d; ++f) {
        const auto& col = ds.column(f);
        if (col.is_numeric()) {
            auto [lo, hi] = std::minmax_element(col.values.begin(), col.values.end());
            if (*hi - *lo > 0.0) cap[f] = den[f] = *hi - *lo;
            z[f] = col.values;
        } else {
            for (std::size_t r = 0; r < n; ++r) z[f][r] = static_cast<double>(col.codes[r]);
        }
    }
    auto diff = [&](std::size_t f, std::size_t a, std::size_t b) {
        return std::min(std::abs(z[f][a] - z[f][b]), cap[f]) / den[f];
    };
    const auto rows = relief_sample_rows(n, samples, seed);
    const std::size_t m = rows.size();

    // Neighbour search per sampled row is independent; accumulation below is
    // sequential so the floating-point sum order is fixed.
    std::vector<std::vector<std::size_t>> hits(m), misses(m);
    parallel_for(m, workers, [&](std::size_t s) {
        const std::size_t i = rows[s];
        std::vector<double> dist(n, 0.0);
        for (std::size_t f = 0; f < d; ++f) {
            const double* col = z[f].data();
            const double a = col[i], c = cap[f], q = den[f];
            double* out = dist.data();
            for (std::size_t j = 0; j < n; ++j) out[j] += std::min(std::abs(col[j] - a), c) / q;
        }
        std::vector<std::pair<double, std::size_t>> same, other;
        same.reserve(n);
        other.reserve(n);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            (ds.label(j) == ds.label(i) ? same : other).emplace_back(dist[j], j);
        }
        auto take = [&](std::vector<std::pair<double, std::size_t>>& v, std::vector<std::size_t>& out) {
            std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(neighbors), v.end());
            for (std::size_t q = 0; q < neighbors; ++q) out.push_back(v[q].second);
        };
        take(same, hits[s]);
        take(other, misses[s]);
    });

    // Raw diff sums are scaled once at the end, which keeps |w| <= 1 exactly.
    std::vector<double> w(d, 0.0);
    for (std::size_t s = 0; s < m; ++s) {
        for (auto h : hits[s])
            for (std::size_t f = 0; f < d; ++f) w[f] -= diff(f, rows[s], h);
        for (auto h : misses[s])
            for (std::size_t f = 0; f < d; ++f) w[f] += diff(f, rows[s], h);
    }
    const double denom = static_cast<double>(m * neighbors);
    for (auto& v : w) v /= denom;
    std::vector<FeatureScore> scores;
    for (std::size_t f = 0; f < d; ++f) scores.push_back({f, w[f]});
    return make_ranking(std::move(scores));
}

FeatureSubset rank_top_k(const RankedScores& scores, std::size_t k) {
    if (k < 1 || k > scores.entries.size())
        throw Error("k = " + std::to_string(k) + " outside [1, " + std::to_string(scores.entries.size()) + "]");
    FeatureSubset out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(scores.entries[i].feature);
    return out;
}

std::vector<std::size_t> stratified_folds(std::span<const Label> labels, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw Error("cross-validation needs at least 2 folds");
    std::vector<std::size_t> fold(labels.size(), 0);
    std::mt19937_64 rng(seed);
    std::size_t dealt = 0;
    for (auto cls : {Label::normal, Label::attack}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) members.push_back(i);
        std::shuffle(members.begin(), members.end(), rng);
        for (auto r : members) fold[r] = dealt++ % folds;
    }
    return fold;
}

double wrapper_merit(const Dataset& train, const FeatureSubset& subset, std::size_t folds, std::uint64_t seed) {
    if (subset.empty()) throw Error("wrapper merit of an empty subset");
    if (train.empty()) throw Error("wrapper merit on an empty dataset");
    const auto signature = make_signature(train, subset);
    BoundFeatures x(train, signature);
    const auto labels = train.labels();
    const auto fold_of = stratified_folds(labels, folds, seed);

    double total = 0.0;
    for (std::size_t k = 0; k < folds; ++k) {
        std::vector<std::size_t> fit_rows, held;
        std::array<std::size_t, kNumLabels> fit_classes{};
        for (std::size_t r = 0; r < labels.size(); ++r) {
            if (fold_of[r] == k) {
                held.push_back(r);
            } else {
                fit_rows.push_back(r);
                ++fit_classes[label_index(labels[r])];
            }
        }
        if (held.empty()) throw Error("degenerate folds: fold " + std::to_string(k) + " is empty");
        if (fit_classes[0] == 0 || fit_classes[1] == 0)
            throw Error("degenerate folds: training part of fold " + std::to_string(k) + " lacks a class");
        auto tree = grow_tree(x, labels, fit_rows, {2, 0, seed});
        std::size_t correct = 0;
        for (auto r : held) correct += tree.predict(x, r) == labels[r] ? 1 : 0;
        total += static_cast<double>(correct) / static_cast<double>(held.size());
    }
    return total / static_cast<double>(folds);
}

std::string_view to_string(StopReason reason) {
    return reason == StopReason::stale_limit ? "stale_limit" : "open_list_exhausted";
}

SearchResult best_first_search(const Dataset& train, const BestFirstOptions& options) {
    const std::size_t d = train.features();
    if (d == 0) throw Error("best-first search needs at least one candidate feature");
    if (train.empty()) throw Error("best-first search on an empty dataset");
    Stopwatch clock;

    struct OpenNode {
        FeatureSubset subset;
        double merit;
        std::size_t order;
    };
    std::vector<OpenNode> open;
    std::set<FeatureSubset> visited;
    SearchResult result;
    result.merit = -std::numeric_limits<double>::infinity();
    auto& trace = result.trace;
    std::size_t stale = 0;

    auto expand = [&](const FeatureSubset& parent) {
        std::vector<FeatureSubset> children;
        for (std::size_t f = 0; f < d; ++f) {
            if (std::binary_search(parent.begin(), parent.end(), f)) continue;
            FeatureSubset child = parent;
            child.insert(std::upper_bound(child.begin(), child.end(), f), f);
            if (visited.insert(child).second) children.push_back(std::move(child));
        }
        std::vector<double> merits(children.size());
        parallel_for(children.size(), options.workers,
                     [&](std::size_t i) { merits[i] = wrapper_merit(train, children[i], options.folds, options.seed); });
        const double before = result.merit;
        bool improved = false;
        for (std::size_t i = 0; i < children.size(); ++i) {
            const double m = merits[i];
            trace.evaluations.push_back({children[i], m, clock.seconds()});
            if (m > before + options.epsilon) improved = true;
            if (m > result.merit) {
                result.merit = m;
                result.subset = children[i];
                trace.best_found_at_depth = children[i].size();
            }
            open.push_back({std::move(children[i]), m, trace.evaluations.size()});
        }
        ++trace.expansions;
        stale = improved ? 0 : stale + 1;
    };

    expand({});
    trace.stop_reason = StopReason::open_list_exhausted;
    while (true) {
        if (options.stop_after > 0 && stale >= options.stop_after) {
            trace.stop_reason = StopReason::stale_limit;
            break;
        }
        if (open.empty()) break;
        auto best = std::min_element(open.begin(), open.end(), [](const OpenNode& a, const OpenNode& b) {
            if (a.merit != b.merit) return a.merit > b.merit;
            return a.order < b.order;
        });
        FeatureSubset next = std::move(best->subset);
        open.erase(best);
        expand(next);
    }
    trace.stale_expansions = stale;
    return result;
}

void write_trace_jsonl(std::ostream& out, const SearchTrace& trace, const Dataset& ds) {
    for (const auto& e : trace.evaluations) {
        nlohmann::json line{{"subset", ds.feature_names(e.subset)}, {"merit", e.merit}, {"timestamp", e.seconds}};
        out << line.dump() << '\n';
    }
}

}  // namespace fsel
