#include "fselids/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace fsel {

namespace {

const Column& planned_column(const Dataset& ds, const std::string& feature, FeatureKind kind) {
    auto idx = ds.find(feature);
    if (!idx) throw Error("schema mismatch: dataset has no feature '" + feature + "'");
    const auto& col = ds.column(*idx);
    if (col.kind != kind)
        throw Error("schema mismatch: feature '" + feature + "' is " + std::string(to_string(col.kind)) +
                    ", plan expects " + std::string(to_string(kind)));
    return col;
}

const Column& require_kind(const Dataset& ds, std::size_t index, FeatureKind kind) {
    const auto& col = ds.column(index);
    if (col.kind != kind)
        throw Error("feature '" + col.name + "' is " + std::string(to_string(col.kind)) + ", expected " +
                    std::string(to_string(kind)));
    return col;
}

// Maps the dataset's codes for `col` onto positions in `categories`.
std::vector<std::uint32_t> remap_codes(const Column& col, const std::vector<std::string>& categories) {
    std::unordered_map<std::string_view, std::uint32_t> pos;
    for (std::size_t i = 0; i < categories.size(); ++i) pos.emplace(categories[i], static_cast<std::uint32_t>(i));
    std::vector<std::uint32_t> table(col.categories.size(), kUnknownCategory);
    for (std::size_t i = 0; i < col.categories.size(); ++i)
        if (auto it = pos.find(col.categories[i]); it != pos.end()) table[i] = it->second;
    return table;
}

}  // namespace

std::size_t OneHotPlan::indicator_width() const {
    std::size_t w = 0;
    for (const auto& f : features) w += f.categories.size();
    return w;
}

std::uint32_t BinBoundaries::bin_of(double value) const {
    return static_cast<std::uint32_t>(std::lower_bound(boundaries.begin(), boundaries.end(), value) -
                                      boundaries.begin());
}

const BinBoundaries* DiscretizationPlan::find(std::string_view feature) const {
    for (const auto& f : features)
        if (f.feature == feature) return &f;
    return nullptr;
}

MinMaxParams fit_minmax(const Dataset& train, const FeatureSubset& features) {
    train.check_subset(features);
    if (train.empty()) throw Error("cannot fit min-max on an empty dataset");
    MinMaxParams params;
    for (auto f : features) {
        const auto& col = require_kind(train, f, FeatureKind::numeric);
        auto [lo, hi] = std::minmax_element(col.values.begin(), col.values.end());
        params.ranges.push_back({col.name, *lo, *hi});
    }
    return params;
}

Dataset apply_minmax(const Dataset& ds, const MinMaxParams& params) {
    std::vector<Column> cols = ds.columns();
    for (const auto& r : params.ranges) {
        planned_column(ds, r.feature, FeatureKind::numeric);
        auto& col = cols[ds.index_of(r.feature)];
        const double span = r.max - r.min;
        for (auto& v : col.values) {
            if (span > 0.0)
                v = std::clamp((v - r.min) / span, 0.0, 1.0);
            else
                v = 0.0;
        }
    }
    return Dataset(std::move(cols), {ds.labels().begin(), ds.labels().end()}, ds.name());
}

OneHotPlan fit_onehot(const Dataset& train, const FeatureSubset& features) {
    train.check_subset(features);
    OneHotPlan plan;
    for (auto f : features) {
        const auto& col = require_kind(train, f, FeatureKind::nominal);
        if (col.categories.empty()) throw Error("nominal feature '" + col.name + "' has no categories");
        plan.features.push_back({col.name, col.categories});
    }
    return plan;
}

Dataset apply_onehot(const Dataset& ds, const OneHotPlan& plan) {
    std::unordered_map<std::string_view, const OneHotFeature*> planned;
    for (const auto& f : plan.features) {
        planned_column(ds, f.feature, FeatureKind::nominal);
        planned.emplace(f.feature, &f);
    }
    std::vector<Column> out;
    for (const auto& col : ds.columns()) {
        auto it = planned.find(col.name);
        if (it == planned.end()) {
            out.push_back(col);
            continue;
        }
        const auto& cats = it->second->categories;
        auto table = remap_codes(col, cats);
        std::vector<std::vector<double>> blocks(cats.size(), std::vector<double>(ds.rows(), 0.0));
        for (std::size_t r = 0; r < ds.rows(); ++r) {
            auto code = col.codes[r];
            if (code == kUnknownCategory) continue;
            auto pos = table[code];
            if (pos != kUnknownCategory) blocks[pos][r] = 1.0;
        }
        for (std::size_t c = 0; c < cats.size(); ++c)
            out.push_back(Column::numeric(col.name + "=" + cats[c], std::move(blocks[c])));
    }
    return Dataset(std::move(out), {ds.labels().begin(), ds.labels().end()}, ds.name());
}

DiscretizationPlan fit_discretizer(const Dataset& train, const FeatureSubset& features, std::size_t bins) {
    if (bins < 2) throw Error("discretizer needs at least 2 bins");
    train.check_subset(features);
    DiscretizationPlan plan;
    for (auto f : features) {
        const auto& col = require_kind(train, f, FeatureKind::numeric);
        std::vector<double> sorted = col.values;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        BinBoundaries bb{col.name, {}};
        for (std::size_t b = 1; b < bins; ++b) {
            std::size_t p = b * n / bins;
            if (p == 0) continue;
            // Slide forward to the next value change.
            while (p < n && sorted[p] == sorted[p - 1]) ++p;
            if (p >= n) break;
            const double lo = sorted[p - 1];
            const double hi = sorted[p];
            double cut = lo + (hi - lo) / 2.0;
            if (!(cut < hi)) cut = lo;
            if (bb.boundaries.empty() || cut > bb.boundaries.back()) bb.boundaries.push_back(cut);
        }
        plan.features.push_back(std::move(bb));
    }
    return plan;
}

Dataset apply_discretizer(const Dataset& ds, const DiscretizationPlan& plan) {
    for (const auto& f : plan.features) planned_column(ds, f.feature, FeatureKind::numeric);
    std::vector<Column> out;
    out.reserve(ds.features());
    for (const auto& col : ds.columns()) {
        const auto* bb = col.is_numeric() ? plan.find(col.name) : nullptr;
        if (!bb) {
            out.push_back(col);
            continue;
        }
        std::vector<std::string> cats;
        for (std::size_t b = 0; b < bb->bins(); ++b) cats.push_back("bin" + std::to_string(b));
        std::vector<std::uint32_t> codes;
        codes.reserve(col.values.size());
        for (double v : col.values) codes.push_back(bb->bin_of(v));
        out.push_back(Column::nominal(col.name, std::move(codes), std::move(cats)));
    }
    return Dataset(std::move(out), {ds.labels().begin(), ds.labels().end()}, ds.name());
}

PreprocessPlan fit_preprocess(const Dataset& train, const FeatureSubset& subset) {
    train.check_subset(subset);
    if (subset.empty()) throw Error("cannot build a preprocessing plan for an empty feature selection");
    FeatureSubset numeric, nominal;
    for (auto f : subset) (train.column(f).is_numeric() ? numeric : nominal).push_back(f);
    PreprocessPlan plan;
    plan.selected_features = train.feature_names(subset);
    plan.minmax = fit_minmax(train, numeric);
    plan.onehot = fit_onehot(train, nominal);
    return plan;
}

Dataset apply_preprocess(const Dataset& ds, const PreprocessPlan& plan) {
    FeatureSubset subset;
    for (const auto& name : plan.selected_features) {
        auto idx = ds.find(name);
        if (!idx) throw Error("schema mismatch: dataset has no feature '" + name + "'");
        subset.push_back(*idx);
    }
    auto selected = ds.select_features(subset);
    return apply_onehot(apply_minmax(selected, plan.minmax), plan.onehot);
}

std::size_t encoded_width(const Dataset& ds, const FeatureSubset& subset) {
    ds.check_subset(subset);
    std::size_t w = 0;
    for (auto f : subset) {
        const auto& col = ds.column(f);
        w += col.is_numeric() ? 1 : col.categories.size();
    }
    return w;
}

nlohmann::json to_json(const DiscretizationPlan& plan) {
    auto arr = nlohmann::json::array();
    for (const auto& f : plan.features) arr.push_back({{"feature", f.feature}, {"boundaries", f.boundaries}});
    return arr;
}

DiscretizationPlan discretization_plan_from_json(const nlohmann::json& doc) {
    DiscretizationPlan plan;
    for (const auto& f : doc) {
        BinBoundaries bb{f.at("feature").get<std::string>(), f.at("boundaries").get<std::vector<double>>()};
        for (std::size_t i = 1; i < bb.boundaries.size(); ++i)
            if (!(bb.boundaries[i] > bb.boundaries[i - 1]))
                throw Error("bin boundaries for '" + bb.feature + "' are not strictly increasing");
        plan.features.push_back(std::move(bb));
    }
    return plan;
}

nlohmann::json to_json(const PreprocessPlan& plan) {
    nlohmann::json doc;
    doc["format"] = "fselids.preprocess_plan";
    doc["version"] = kPlanFormatVersion;
    doc["selected_features"] = plan.selected_features;
    auto mm = nlohmann::json::array();
    for (const auto& r : plan.minmax.ranges) mm.push_back({{"feature", r.feature}, {"min", r.min}, {"max", r.max}});
    doc["minmax"] = mm;
    auto oh = nlohmann::json::array();
    for (const auto& f : plan.onehot.features) oh.push_back({{"feature", f.feature}, {"categories", f.categories}});
    doc["onehot"] = oh;
    if (plan.discretization) doc["discretization"] = to_json(*plan.discretization);
    return doc;
}

PreprocessPlan preprocess_plan_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format").get<std::string>() != "fselids.preprocess_plan")
            throw Error("not a preprocess plan document");
        if (doc.at("version").get<int>() != kPlanFormatVersion)
            throw Error("unsupported preprocess plan version " + doc.at("version").dump());
        PreprocessPlan plan;
        plan.selected_features = doc.at("selected_features").get<std::vector<std::string>>();
        for (const auto& r : doc.at("minmax")) {
            MinMaxRange range{r.at("feature").get<std::string>(), r.at("min").get<double>(),
                              r.at("max").get<double>()};
            if (range.min > range.max) throw Error("min-max range for '" + range.feature + "' has min > max");
            plan.minmax.ranges.push_back(std::move(range));
        }
        for (const auto& f : doc.at("onehot"))
            plan.onehot.features.push_back(
                {f.at("feature").get<std::string>(), f.at("categories").get<std::vector<std::string>>()});
        if (doc.contains("discretization"))
            plan.discretization = discretization_plan_from_json(doc.at("discretization"));
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed preprocess plan: ") + e.what());
    }
}

}  // namespace fsel
