#include "fselids/evaluate.hpp"

#include <cstdio>

namespace fsel {

namespace {

template <class F>
auto stage(const char* name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const Error& e) {
        throw Error(std::string("stage '") + name + "': " + e.what());
    }
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> truth, Label positive) {
    if (predicted.size() != truth.size())
        throw Error("confusion: " + std::to_string(predicted.size()) + " predictions for " +
                    std::to_string(truth.size()) + " labels");
    if (truth.empty()) throw Error("confusion: no rows");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool pred_pos = predicted[i] == positive;
        const bool true_pos = truth[i] == positive;
        if (pred_pos && true_pos) ++cm.tp;
        else if (!pred_pos && !true_pos) ++cm.tn;
        else if (pred_pos) ++cm.fp;
        else ++cm.fn;
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw Error("accuracy of an empty confusion matrix");
    return 100.0 * static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

double detection_rate(const ConfusionMatrix& cm) {
    if (cm.positives() == 0) throw Error("detection rate undefined: no attack rows in the truth labels");
    return 100.0 * static_cast<double>(cm.tp) / static_cast<double>(cm.positives());
}

double false_alarm_rate(const ConfusionMatrix& cm) {
    if (cm.negatives() == 0) throw Error("false alarm rate undefined: no normal rows in the truth labels");
    return 100.0 * static_cast<double>(cm.fp) / static_cast<double>(cm.negatives());
}

std::string_view to_string(FsMethod method) {
    switch (method) {
        case FsMethod::none: return "none";
        case FsMethod::wrapper: return "wrapper";
        case FsMethod::infogain: return "infogain";
        case FsMethod::gainratio: return "gainratio";
        case FsMethod::relief: return "relief";
        case FsMethod::fixed: return "fixed";
    }
    return "?";
}

FsMethod fs_method_from_string(std::string_view token) {
    if (token == "none") return FsMethod::none;
    if (token == "wrapper") return FsMethod::wrapper;
    if (token == "infogain") return FsMethod::infogain;
    if (token == "gainratio") return FsMethod::gainratio;
    if (token == "relief") return FsMethod::relief;
    if (token == "fixed") return FsMethod::fixed;
    throw Error("unknown feature selection method '" + std::string(token) + "'");
}

bool is_filter(FsMethod method) {
    return method == FsMethod::infogain || method == FsMethod::gainratio || method == FsMethod::relief;
}

Selection select_features(const Dataset& train, const PipelineConfig& config) {
    Selection sel;
    Stopwatch clock;
    switch (config.fs) {
        case FsMethod::none: sel.subset = train.all_features(); break;
        case FsMethod::fixed:
            if (config.features.empty()) throw Error("fixed selection needs a feature list");
            sel.subset = train.subset_from_names(config.features);
            break;
        case FsMethod::infogain:
        case FsMethod::gainratio: {
            FeatureSubset numeric;
            for (std::size_t f = 0; f < train.features(); ++f)
                if (train.column(f).is_numeric()) numeric.push_back(f);
            auto bins = fit_discretizer(train, numeric, config.bins);
            sel.ranking = config.fs == FsMethod::infogain ? info_gain_ranking(train, bins)
                                                          : gain_ratio_ranking(train, bins);
            sel.subset = rank_top_k(*sel.ranking, config.k);
            break;
        }
        case FsMethod::relief: {
            const std::size_t m = config.relief_samples == 0 ? train.rows() : config.relief_samples;
            sel.ranking = relief_weights(train, m, config.relief_neighbors, config.params.seed, config.params.workers);
            sel.subset = rank_top_k(*sel.ranking, config.k);
            break;
        }
        case FsMethod::wrapper: {
            BestFirstOptions opts;
            opts.folds = config.folds;
            opts.stop_after = config.stop_after;
            opts.epsilon = config.epsilon;
            opts.seed = config.params.seed;
            opts.workers = config.params.workers;
            sel.search = best_first_search(train, opts);
            sel.subset = sel.search->subset;
            break;
        }
    }
    sel.fs_seconds = clock.seconds();
    return sel;
}

EvaluationReport make_report(const ConfusionMatrix& cm) {
    EvaluationReport r;
    r.cm = cm;
    r.acc = accuracy(cm);
    r.dr = detection_rate(cm);
    r.far = false_alarm_rate(cm);
    return r;
}

double accuracy_from_rates(const EvaluationReport& report) {
    const double p = static_cast<double>(report.cm.positives());
    const double n = static_cast<double>(report.cm.negatives());
    return (report.dr * p + (100.0 - report.far) * n) / (p + n);
}

Dataset load_training_split(const PipelineConfig& config, const FeatureSchema& schema) {
    LoadOptions opts;
    opts.positive_label = config.positive_label;
    opts.negative_label = config.negative_label;
    auto train = load_csv(config.train_path, schema, opts);
    if (config.subsample < 1.0) train = stratified_subsample(train, config.subsample, config.params.seed);
    return train;
}

Dataset load_test_split(const PipelineConfig& config, const FeatureSchema& schema, const Dataset& train) {
    LoadOptions opts;
    opts.positive_label = config.positive_label;
    opts.negative_label = config.negative_label;
    opts.vocabulary = &train;
    return load_csv(config.test_path, schema, opts);
}

PipelineRun run_pipeline(const Dataset& train_in, const Dataset& test, const PipelineConfig& config,
                         const Selection* precomputed) {
    const Dataset train = stage("subsample", [&] {
        return config.subsample < 1.0 ? stratified_subsample(train_in, config.subsample, config.params.seed)
                                      : train_in;
    });
    PipelineRun run;
    run.selection = precomputed ? *precomputed : stage("select", [&] { return select_features(train, config); });
    if (run.selection.subset.empty()) throw Error("stage 'select': selection is empty");

    Stopwatch train_clock;
    run.plan = stage("fit-transforms", [&] { return fit_preprocess(train, run.selection.subset); });
    const Dataset encoded_train = stage("transform-train", [&] { return apply_preprocess(train, run.plan); });
    run.model = stage("train", [&] { return fit_model(encoded_train, encoded_train.all_features(), config.params); });
    const double train_seconds = train_clock.seconds();

    Stopwatch eval_clock;
    const auto predicted = stage("predict", [&] { return predict(run.model, apply_preprocess(test, run.plan)); });
    const double eval_seconds = eval_clock.seconds();

    run.report = stage("metrics", [&] { return make_report(confusion(predicted, test.labels())); });
    run.report.dataset = test.name();
    run.report.fs_method = std::string(to_string(config.fs));
    run.report.selected_features = train.feature_names(run.selection.subset);
    run.report.encoded_width = encoded_train.features();
    run.report.algorithm = std::string(to_string(config.params.algorithm));
    run.report.timings = {run.selection.fs_seconds, train_seconds, eval_seconds};
    return run;
}

PipelineRun run_pipeline(const PipelineConfig& config) {
    const auto schema = stage("load", [&] { return read_schema_file(config.schema_path); });
    LoadOptions opts;
    opts.positive_label = config.positive_label;
    opts.negative_label = config.negative_label;
    const auto train = stage("load", [&] { return load_csv(config.train_path, schema, opts); });
    const auto test = stage("load", [&] { return load_test_split(config, schema, train); });
    return run_pipeline(train, test, config);
}

nlohmann::json to_json(const EvaluationReport& r) {
    return {{"dataset", r.dataset},
            {"fs_method", r.fs_method},
            {"selected_count", r.selected_count()},
            {"selected_features", r.selected_features},
            {"encoded_width", r.encoded_width},
            {"algorithm", r.algorithm},
            {"confusion", {{"tp", r.cm.tp}, {"tn", r.cm.tn}, {"fp", r.cm.fp}, {"fn", r.cm.fn}}},
            {"acc", r.acc},
            {"dr", r.dr},
            {"far", r.far},
            {"timings",
             {{"fs_seconds", r.timings.fs_seconds},
              {"train_seconds", r.timings.train_seconds},
              {"eval_seconds", r.timings.eval_seconds},
              {"overall_seconds", r.timings.overall()}}}};
}

EvaluationReport evaluation_report_from_json(const nlohmann::json& doc) {
    try {
        auto require = [&](const nlohmann::json& obj, const char* key, auto check) -> const nlohmann::json& {
            if (!obj.contains(key)) throw Error(std::string("report is missing '") + key + "'");
            const auto& v = obj.at(key);
            if (!check(v)) throw Error(std::string("report field '") + key + "' has the wrong type");
            return v;
        };
        auto is_str = [](const nlohmann::json& v) { return v.is_string(); };
        auto is_count = [](const nlohmann::json& v) { return v.is_number_unsigned(); };
        auto is_num = [](const nlohmann::json& v) { return v.is_number(); };
        auto is_obj = [](const nlohmann::json& v) { return v.is_object(); };
        auto is_arr = [](const nlohmann::json& v) { return v.is_array(); };

        EvaluationReport r;
        r.dataset = require(doc, "dataset", is_str).get<std::string>();
        r.fs_method = require(doc, "fs_method", is_str).get<std::string>();
        r.selected_features = require(doc, "selected_features", is_arr).get<std::vector<std::string>>();
        if (require(doc, "selected_count", is_count).get<std::size_t>() != r.selected_features.size())
            throw Error("report selected_count disagrees with selected_features");
        r.encoded_width = require(doc, "encoded_width", is_count).get<std::size_t>();
        r.algorithm = require(doc, "algorithm", is_str).get<std::string>();
        const auto& cm = require(doc, "confusion", is_obj);
        r.cm.tp = require(cm, "tp", is_count).get<std::size_t>();
        r.cm.tn = require(cm, "tn", is_count).get<std::size_t>();
        r.cm.fp = require(cm, "fp", is_count).get<std::size_t>();
        r.cm.fn = require(cm, "fn", is_count).get<std::size_t>();
        r.acc = require(doc, "acc", is_num).get<double>();
        r.dr = require(doc, "dr", is_num).get<double>();
        r.far = require(doc, "far", is_num).get<double>();
        for (double v : {r.acc, r.dr, r.far})
            if (v < 0.0 || v > 100.0) throw Error("report metric outside [0, 100]");
        const auto& t = require(doc, "timings", is_obj);
        r.timings.fs_seconds = require(t, "fs_seconds", is_num).get<double>();
        r.timings.train_seconds = require(t, "train_seconds", is_num).get<double>();
        r.timings.eval_seconds = require(t, "eval_seconds", is_num).get<double>();
        require(t, "overall_seconds", is_num);
        if (r.timings.fs_seconds < 0.0 || r.timings.train_seconds < 0.0 || r.timings.eval_seconds < 0.0)
            throw Error("report timings must be non-negative");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed report: ") + e.what());
    }
}

std::string markdown_header() { return "| Model | FS method | ACC | DR | FAR |\n|---|---|---|---|---|"; }

std::string to_markdown_row(const EvaluationReport& r) {
    return "| " + r.algorithm + " | " + r.fs_method + " | " + fmt2(r.acc) + " | " + fmt2(r.dr) + " | " +
           fmt2(r.far) + " |";
}

}  // namespace fsel
