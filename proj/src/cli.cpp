#include "fselids/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fsel {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base.empty()) return base / path;
    return path;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

void require_paths(const PipelineConfig& p, bool need_test) {
    if (p.train_path.empty()) throw Error("config: training CSV path is required");
    if (p.schema_path.empty()) throw Error("config: schema path is required");
    if (need_test && p.test_path.empty()) throw Error("config: test CSV path is required");
    if (p.k < 1) throw Error("config: k must be >= 1");
    if (!(p.subsample > 0.0 && p.subsample <= 1.0)) throw Error("config: subsample must lie in (0, 1]");
}

json ranking_json(const RankedScores& ranking, const Dataset& ds) {
    json arr = json::array();
    for (const auto& e : ranking.entries) arr.push_back({{"feature", ds.column(e.feature).name}, {"score", e.score}});
    return arr;
}

struct LoadedSplits {
    FeatureSchema schema;
    Dataset train;
};

LoadedSplits load_train(const PipelineConfig& p) {
    LoadedSplits s;
    s.schema = read_schema_file(p.schema_path);
    s.train = load_training_split(p, s.schema);
    return s;
}

}  // namespace

RunConfig run_config_from_json(const json& doc, RunConfig c, const std::filesystem::path& base_dir) {
    try {
        auto& p = c.pipeline;
        if (doc.contains("train")) p.train_path = resolve(base_dir, doc.at("train").get<std::string>());
        if (doc.contains("test")) p.test_path = resolve(base_dir, doc.at("test").get<std::string>());
        if (doc.contains("schema")) p.schema_path = resolve(base_dir, doc.at("schema").get<std::string>());
        if (doc.contains("out")) c.out = resolve(base_dir, doc.at("out").get<std::string>());
        if (doc.contains("model")) c.model_dir = resolve(base_dir, doc.at("model").get<std::string>());
        if (doc.contains("positive_label")) p.positive_label = doc.at("positive_label").get<std::string>();
        if (doc.contains("negative_label")) p.negative_label = doc.at("negative_label").get<std::string>();
        if (doc.contains("fs")) p.fs = fs_method_from_string(doc.at("fs").get<std::string>());
        if (doc.contains("k")) p.k = doc.at("k").get<std::size_t>();
        if (doc.contains("features")) {
            p.features = doc.at("features").get<std::vector<std::string>>();
            if (!doc.contains("fs")) p.fs = FsMethod::fixed;
        }
        if (doc.contains("bins")) p.bins = doc.at("bins").get<std::size_t>();
        if (doc.contains("relief_samples")) p.relief_samples = doc.at("relief_samples").get<std::size_t>();
        if (doc.contains("relief_neighbors")) p.relief_neighbors = doc.at("relief_neighbors").get<std::size_t>();
        if (doc.contains("folds")) p.folds = doc.at("folds").get<std::size_t>();
        if (doc.contains("stop_after")) p.stop_after = doc.at("stop_after").get<std::size_t>();
        if (doc.contains("epsilon")) p.epsilon = doc.at("epsilon").get<double>();
        if (doc.contains("subsample")) p.subsample = doc.at("subsample").get<double>();
        if (doc.contains("params")) p.params = train_params_from_json(doc.at("params"), p.params);
        if (doc.contains("algo")) p.params.algorithm = algorithm_from_string(doc.at("algo").get<std::string>());
        if (doc.contains("seed")) p.params.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("jobs")) c.jobs = doc.at("jobs").get<std::size_t>();
        if (doc.contains("grid")) {
            const auto& g = doc.at("grid");
            c.grid_fs.clear();
            c.grid_algorithms.clear();
            for (const auto& f : g.at("fs")) c.grid_fs.push_back(fs_method_from_string(f.get<std::string>()));
            for (const auto& a : g.at("algorithms")) c.grid_algorithms.push_back(algorithm_from_string(a.get<std::string>()));
        }
    } catch (const json::exception& e) {
        throw Error(std::string("malformed config: ") + e.what());
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return run_config_from_json(read_json(path), {}, path.parent_path());
}

SelectOutput cmd_select(const RunConfig& config) {
    const auto& p = config.pipeline;
    require_paths(p, false);
    if (p.fs == FsMethod::none) throw Error("select: --fs must name a selection method");
    auto loaded = load_train(p);
    SelectOutput out;
    out.selection = select_features(loaded.train, p);
    out.names = loaded.train.feature_names(out.selection.subset);

    json doc{{"fs_method", to_string(p.fs)},
             {"k", out.names.size()},
             {"features", out.names},
             {"fs_seconds", out.selection.fs_seconds},
             {"seed", p.params.seed}};
    if (out.selection.search) {
        doc["merit"] = out.selection.search->merit;
        doc["stop_reason"] = to_string(out.selection.search->trace.stop_reason);
        doc["expansions"] = out.selection.search->trace.expansions;
        std::ostringstream trace;
        write_trace_jsonl(trace, out.selection.search->trace, loaded.train);
        write_text(config.out / "trace.jsonl", trace.str());
    }
    if (out.selection.ranking) write_json(config.out / "scores.json", ranking_json(*out.selection.ranking, loaded.train));
    write_json(config.out / "selection.json", doc);
    return out;
}

TrainOutput cmd_train(const RunConfig& config) {
    const auto& p = config.pipeline;
    require_paths(p, false);
    auto loaded = load_train(p);
    TrainOutput out;
    out.selection = select_features(loaded.train, p);
    if (out.selection.subset.empty()) throw Error("train: the feature selection is empty");
    Stopwatch clock;
    out.plan = fit_preprocess(loaded.train, out.selection.subset);
    const auto encoded = apply_preprocess(loaded.train, out.plan);
    out.model = fit_model(encoded, encoded.all_features(), p.params);
    const double train_seconds = clock.seconds();

    write_json(config.out / "plan.json", to_json(out.plan));
    write_json(config.out / "model.json", to_json(out.model));
    write_json(config.out / "train_summary.json",
               {{"fs_method", to_string(p.fs)},
                {"selected_features", out.plan.selected_features},
                {"encoded_width", encoded.features()},
                {"algorithm", to_string(out.model.algorithm)},
                {"fs_seconds", out.selection.fs_seconds},
                {"train_seconds", train_seconds},
                {"model_train_seconds", out.model.train_seconds}});
    return out;
}

EvaluationReport cmd_evaluate(const RunConfig& config) {
    const auto& p = config.pipeline;
    EvaluationReport report;
    if (!config.model_dir.empty()) {
        if (p.test_path.empty() || p.schema_path.empty()) throw Error("evaluate: test CSV and schema are required");
        const auto plan = preprocess_plan_from_json(read_json(config.model_dir / "plan.json"));
        const auto model = trained_model_from_json(read_json(config.model_dir / "model.json"));
        const auto schema = read_schema_file(p.schema_path);
        LoadOptions opts;
        opts.positive_label = p.positive_label;
        opts.negative_label = p.negative_label;
        const auto test = load_csv(p.test_path, schema, opts);
        Stopwatch clock;
        const auto predicted = predict(model, apply_preprocess(test, plan));
        const double eval_seconds = clock.seconds();
        report = make_report(confusion(predicted, test.labels()));
        report.dataset = test.name();
        report.fs_method = "saved";
        report.selected_features = plan.selected_features;
        report.encoded_width = model.signature.size();
        report.algorithm = std::string(to_string(model.algorithm));
        report.timings = {0.0, model.train_seconds, eval_seconds};
        auto summary = config.model_dir / "train_summary.json";
        if (std::filesystem::exists(summary)) {
            const auto s = read_json(summary);
            report.fs_method = s.value("fs_method", report.fs_method);
            report.timings.fs_seconds = s.value("fs_seconds", 0.0);
            report.timings.train_seconds = s.value("train_seconds", report.timings.train_seconds);
        }
    } else {
        require_paths(p, true);
        report = run_pipeline(p).report;
    }
    write_json(config.out / "report.json", to_json(report));
    write_text(config.out / "report.md", markdown_header() + "\n" + to_markdown_row(report) + "\n");
    return report;
}

bool BenchOutput::all_succeeded() const {
    return std::all_of(cells.begin(), cells.end(), [](const BenchCell& c) { return c.report.has_value(); });
}

std::vector<BenchAverage> bench_averages(const std::vector<BenchCell>& cells) {
    std::vector<BenchAverage> out;
    for (const auto& c : cells) {
        if (!c.report) continue;
        auto it = std::find_if(out.begin(), out.end(), [&](const BenchAverage& a) { return a.fs == c.fs; });
        if (it == out.end()) {
            out.push_back({c.fs, c.report->timings.fs_seconds, 0.0, 0.0, 0});
            it = out.end() - 1;
        }
        it->mean_train_seconds += c.report->timings.train_seconds;
        it->mean_overall_seconds += c.report->timings.overall();
        ++it->cells;
    }
    for (auto& a : out) {
        a.mean_train_seconds /= static_cast<double>(a.cells);
        a.mean_overall_seconds /= static_cast<double>(a.cells);
    }
    return out;
}

BenchOutput cmd_bench(const RunConfig& config) {
    const auto& base = config.pipeline;
    require_paths(base, true);
    const auto fs_grid = config.grid_fs.empty() ? std::vector<FsMethod>{base.fs} : config.grid_fs;
    const auto algo_grid =
        config.grid_algorithms.empty() ? std::vector<Algorithm>{base.params.algorithm} : config.grid_algorithms;

    const auto schema = read_schema_file(base.schema_path);
    LoadOptions opts;
    opts.positive_label = base.positive_label;
    opts.negative_label = base.negative_label;
    const auto full_train = load_csv(base.train_path, schema, opts);
    const auto test = load_test_split(base, schema, full_train);
    const auto train =
        base.subsample < 1.0 ? stratified_subsample(full_train, base.subsample, base.params.seed) : full_train;

    BenchOutput bench;
    std::map<FsMethod, Selection> selections;
    std::map<FsMethod, std::string> selection_errors;
    for (auto fs : fs_grid) {
        PipelineConfig cfg = base;
        cfg.fs = fs;
        try {
            selections.emplace(fs, select_features(train, cfg));
        } catch (const Error& e) {
            selection_errors.emplace(fs, std::string("stage 'select': ") + e.what());
        }
    }
    for (auto fs : fs_grid)
        for (auto algo : algo_grid) bench.cells.push_back({fs, algo, std::nullopt, {}});

    parallel_for(bench.cells.size(), std::max<std::size_t>(1, config.jobs), [&](std::size_t i) {
        auto& cell = bench.cells[i];
        if (auto err = selection_errors.find(cell.fs); err != selection_errors.end()) {
            cell.error = err->second;
            return;
        }
        PipelineConfig cfg = base;
        cfg.fs = cell.fs;
        cfg.subsample = 1.0;
        cfg.params.algorithm = cell.algorithm;
        try {
            cell.report = run_pipeline(train, test, cfg, &selections.at(cell.fs)).report;
        } catch (const Error& e) {
            cell.error = e.what();
        }
    });
    bench.averages = bench_averages(bench.cells);

    write_json(config.out / "bench.json", to_json(bench));
    write_text(config.out / "bench.md", bench_markdown(bench));
    for (std::size_t i = 0; i < bench.cells.size(); ++i) {
        const auto& c = bench.cells[i];
        if (c.report)
            write_json(config.out / "cells" /
                           (std::string(to_string(c.fs)) + "_" + std::string(to_string(c.algorithm)) + ".json"),
                       to_json(*c.report));
    }
    return bench;
}

json to_json(const BenchOutput& bench) {
    json cells = json::array();
    for (const auto& c : bench.cells) {
        json j{{"fs_method", to_string(c.fs)}, {"algorithm", to_string(c.algorithm)}};
        if (c.report) j["report"] = to_json(*c.report);
        else j["error"] = c.error;
        cells.push_back(std::move(j));
    }
    json avgs = json::array();
    for (const auto& a : bench.averages)
        avgs.push_back({{"fs_method", to_string(a.fs)},
                        {"fs_seconds", a.fs_seconds},
                        {"mean_train_seconds", a.mean_train_seconds},
                        {"mean_overall_seconds", a.mean_overall_seconds},
                        {"cells", a.cells}});
    return {{"cells", cells}, {"averages", avgs}};
}

std::string bench_markdown(const BenchOutput& bench) {
    std::vector<FsMethod> fs_cols;
    std::vector<Algorithm> algo_rows;
    for (const auto& c : bench.cells) {
        if (std::find(fs_cols.begin(), fs_cols.end(), c.fs) == fs_cols.end()) fs_cols.push_back(c.fs);
        if (std::find(algo_rows.begin(), algo_rows.end(), c.algorithm) == algo_rows.end()) algo_rows.push_back(c.algorithm);
    }
    auto cell_for = [&](Algorithm a, FsMethod f) -> const BenchCell* {
        for (const auto& c : bench.cells)
            if (c.algorithm == a && c.fs == f) return &c;
        return nullptr;
    };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };
    std::ostringstream md;
    md << "| Model | Metric |";
    for (auto f : fs_cols) md << ' ' << to_string(f) << " |";
    md << "\n|---|---|";
    for (std::size_t i = 0; i < fs_cols.size(); ++i) md << "---|";
    md << '\n';
    for (auto a : algo_rows) {
        for (const char* metric : {"ACC", "DR", "FAR"}) {
            md << "| " << to_string(a) << " | " << metric << " |";
            for (auto f : fs_cols) {
                const auto* c = cell_for(a, f);
                if (!c || !c->report) {
                    md << " error |";
                    continue;
                }
                const auto& r = *c->report;
                const double v = metric[0] == 'A' ? r.acc : metric[0] == 'D' ? r.dr : r.far;
                md << ' ' << fmt(v) << " |";
            }
            md << '\n';
        }
    }
    md << "\n| FS method | FS time (s) | Mean train time (s) | Mean overall time (s) |\n|---|---|---|---|\n";
    for (const auto& a : bench.averages)
        md << "| " << to_string(a.fs) << " | " << fmt(a.fs_seconds) << " | " << fmt(a.mean_train_seconds) << " | "
           << fmt(a.mean_overall_seconds) << " |\n";
    return md.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Feature selection and intrusion-detection model benchmarking"};
    app.require_subcommand(1);

    std::string config_path, train, test, schema, fs, algo, out_dir, model, features, params_json;
    std::size_t k = 0, bins = 0, jobs = 0, folds = 0, relief_samples = 0;
    std::uint64_t seed = 0;
    double subsample = 1.0;
    std::map<std::string, CLI::Option*> opts;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--train", train, "training CSV");
        sub->add_option("--test", test, "test CSV");
        sub->add_option("--schema", schema, "schema file (name,kind lines)");
        sub->add_option("--fs", fs, "none|wrapper|infogain|gainratio|relief|fixed (bench: comma list)");
        sub->add_option("--k", k, "number of features kept by filter methods");
        sub->add_option("--algo", algo, "tree|forest|naive_bayes|knn|mlp|linear_svm (bench: comma list)");
        sub->add_option("--seed", seed, "run seed");
        sub->add_option("--subsample", subsample, "stratified training fraction in (0,1]");
        sub->add_option("--bins", bins, "equal-frequency bins for the entropy filters");
        sub->add_option("--jobs", jobs, "concurrent bench cells");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--features", features, "comma-separated feature list (implies --fs fixed)");
        sub->add_option("--folds", folds, "wrapper cross-validation folds");
        sub->add_option("--relief-samples", relief_samples, "Relief sampled instances (0 = all rows)");
        sub->add_option("--params", params_json, "JSON object of hyperparameter overrides");
    };
    auto* sel = app.add_subcommand("select", "rank or search features and write the selected list");
    auto* trn = app.add_subcommand("train", "select, fit transforms, train, and save model + plan");
    auto* evl = app.add_subcommand("evaluate", "hold-out evaluation from a config or a saved model");
    auto* bch = app.add_subcommand("bench", "FS-method x algorithm grid with aggregate timings");
    for (auto* s : {sel, trn, evl, bch}) add_common(s);
    evl->add_option("--model", model, "directory written by the train command");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }
    CLI::App* cmd = app.get_subcommands().front();
    auto given = [&](const char* name) {
        const auto* opt = cmd->get_option_no_throw(name);
        return opt && opt->count() > 0;
    };

    try {
        RunConfig cfg;
        if (given("--config")) cfg = load_run_config(config_path);
        auto& p = cfg.pipeline;
        if (given("--train")) p.train_path = train;
        if (given("--test")) p.test_path = test;
        if (given("--schema")) p.schema_path = schema;
        if (given("--params")) p.params = train_params_from_json(json::parse(params_json), p.params);
        if (given("--k")) p.k = k;
        if (given("--seed")) p.params.seed = seed;
        if (given("--subsample")) p.subsample = subsample;
        if (given("--bins")) p.bins = bins;
        if (given("--jobs")) cfg.jobs = jobs;
        if (given("--out")) cfg.out = out_dir;
        if (given("--folds")) p.folds = folds;
        if (given("--relief-samples")) p.relief_samples = relief_samples;
        if (given("--features")) {
            p.features = split_list(features);
            p.fs = FsMethod::fixed;
        }
        if (given("--model")) cfg.model_dir = model;
        if (given("--fs")) {
            auto list = split_list(fs);
            if (list.empty()) throw Error("--fs is empty");
            p.fs = fs_method_from_string(list.front());
            if (cmd == bch) {
                cfg.grid_fs.clear();
                for (const auto& f : list) cfg.grid_fs.push_back(fs_method_from_string(f));
            }
        }
        if (given("--algo")) {
            auto list = split_list(algo);
            if (list.empty()) throw Error("--algo is empty");
            p.params.algorithm = algorithm_from_string(list.front());
            if (cmd == bch) {
                cfg.grid_algorithms.clear();
                for (const auto& a : list) cfg.grid_algorithms.push_back(algorithm_from_string(a));
            }
        }
        validate(p.params);

        if (cmd == sel) {
            auto r = cmd_select(cfg);
            for (const auto& n : r.names) out << n << '\n';
        } else if (cmd == trn) {
            auto r = cmd_train(cfg);
            out << "trained " << to_string(r.model.algorithm) << " on " << r.plan.selected_features.size()
                << " features -> " << (cfg.out / "model.json").string() << '\n';
        } else if (cmd == evl) {
            auto r = cmd_evaluate(cfg);
            out << markdown_header() << '\n' << to_markdown_row(r) << '\n';
        } else {
            auto r = cmd_bench(cfg);
            out << bench_markdown(r);
            if (!r.all_succeeded()) {
                for (const auto& c : r.cells)
                    if (!c.report) err << to_string(c.fs) << " x " << to_string(c.algorithm) << ": " << c.error << '\n';
                return 1;
            }
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace fsel
