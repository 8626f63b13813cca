#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fselids/cli.hpp"
#include "support.hpp"

using namespace fsel;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int status = 0;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    args.insert(args.begin(), "fsel_ids");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = testkit::scratch_dir(std::string("cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        const auto train = testkit::random_dataset(31, {160, 6});
        const auto test = testkit::random_dataset(32, {80, 6, 0.4, 12, 12, 31});
        std::tie(train_csv, schema) = testkit::write_csv(train, dir, "train");
        test_csv = testkit::write_csv(test, dir, "test").first;
    }

    std::vector<std::string> data_flags() const {
        return {"--train", train_csv.string(), "--test", test_csv.string(), "--schema", schema.string()};
    }

    std::vector<std::string> with_data(std::vector<std::string> head) const {
        auto flags = data_flags();
        head.insert(head.end(), flags.begin(), flags.end());
        return head;
    }

    fs::path dir, train_csv, test_csv, schema;
};

}  // namespace

TEST_F(Cli, SelectWritesSelectionAndScores) {
    const auto r = run(with_data({"select", "--fs", "infogain", "--k", "3", "--out", (dir / "sel").string()}));
    ASSERT_EQ(r.status, 0) << r.err;
    const auto sel = read_json(dir / "sel" / "selection.json");
    EXPECT_EQ(sel["fs_method"], "infogain");
    EXPECT_EQ(sel["features"].size(), 3u);
    EXPECT_EQ(sel["k"], 3);
    EXPECT_TRUE(fs::exists(dir / "sel" / "scores.json"));
    EXPECT_FALSE(fs::exists(dir / "sel" / "trace.jsonl"));
    // stdout lists the selected names, one per line.
    std::istringstream lines(r.out);
    std::string name;
    std::size_t i = 0;
    while (std::getline(lines, name)) EXPECT_EQ(name, sel["features"][i++]);
    EXPECT_EQ(i, 3u);
}

TEST_F(Cli, WrapperSelectWritesTrace) {
    const auto r = run(with_data({"select", "--fs", "wrapper", "--out", (dir / "w").string()}));
    ASSERT_EQ(r.status, 0) << r.err;
    const auto sel = read_json(dir / "w" / "selection.json");
    EXPECT_TRUE(sel.contains("merit"));
    EXPECT_TRUE(sel.contains("stop_reason"));
    std::istringstream trace(read_text(dir / "w" / "trace.jsonl"));
    std::string line;
    std::size_t n = 0;
    while (std::getline(trace, line)) {
        EXPECT_TRUE(nlohmann::json::parse(line).contains("merit"));
        ++n;
    }
    EXPECT_GT(n, 0u);
}

TEST_F(Cli, TrainThenEvaluateSavedModelMatchesDirectEvaluation) {
    const auto model_dir = (dir / "model").string();
    auto t = run(with_data({"train", "--fs", "gainratio", "--k", "4", "--algo", "naive_bayes", "--out", model_dir}));
    ASSERT_EQ(t.status, 0) << t.err;
    for (const char* f : {"plan.json", "model.json", "train_summary.json"})
        EXPECT_TRUE(fs::exists(fs::path(model_dir) / f)) << f;

    auto e = run({"evaluate", "--model", model_dir, "--test", test_csv.string(), "--schema", schema.string(),
                  "--train", train_csv.string(), "--out", (dir / "eval_saved").string()});
    ASSERT_EQ(e.status, 0) << e.err;
    auto d = run(with_data({"evaluate", "--fs", "gainratio", "--k", "4", "--algo", "naive_bayes", "--out",
                            (dir / "eval_direct").string()}));
    ASSERT_EQ(d.status, 0) << d.err;

    const auto saved = evaluation_report_from_json(read_json(dir / "eval_saved" / "report.json"));
    const auto direct = evaluation_report_from_json(read_json(dir / "eval_direct" / "report.json"));
    EXPECT_EQ(saved.cm, direct.cm);
    EXPECT_EQ(saved.selected_features, direct.selected_features);
    EXPECT_EQ(saved.fs_method, "gainratio");
    EXPECT_NE(read_text(dir / "eval_saved" / "report.md").find("| naive_bayes | gainratio |"), std::string::npos);
}

TEST_F(Cli, ConfigFileWithRelativePathsAndFlagOverrides) {
    const auto cfg_dir = dir / "cfg";
    fs::create_directories(cfg_dir);
    fs::copy_file(train_csv, cfg_dir / "train.csv", fs::copy_options::overwrite_existing);
    fs::copy_file(test_csv, cfg_dir / "test.csv", fs::copy_options::overwrite_existing);
    fs::copy_file(schema, cfg_dir / "flows.schema", fs::copy_options::overwrite_existing);
    const nlohmann::json doc{{"train", "train.csv"},   {"test", "test.csv"}, {"schema", "flows.schema"},
                             {"fs", "relief"},         {"k", 2},             {"algo", "knn"},
                             {"params", {{"knn", {{"k", 3}}}}}, {"seed", 4}, {"out", "results"}};
    std::ofstream(cfg_dir / "run.json") << doc.dump(2);

    const auto cfg = load_run_config(cfg_dir / "run.json");
    EXPECT_EQ(cfg.pipeline.train_path, cfg_dir / "train.csv");
    EXPECT_EQ(cfg.out, cfg_dir / "results");
    EXPECT_EQ(cfg.pipeline.fs, FsMethod::relief);
    EXPECT_EQ(cfg.pipeline.params.knn.k, 3u);
    EXPECT_EQ(cfg.pipeline.params.seed, 4u);

    const auto r = run({"evaluate", "--config", (cfg_dir / "run.json").string()});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto rep = read_json(cfg_dir / "results" / "report.json");
    EXPECT_EQ(rep["fs_method"], "relief");
    EXPECT_EQ(rep["selected_count"], 2);

    const auto o = run({"evaluate", "--config", (cfg_dir / "run.json").string(), "--k", "5", "--algo", "tree", "--out",
                        (dir / "override").string()});
    ASSERT_EQ(o.status, 0) << o.err;
    const auto over = read_json(dir / "override" / "report.json");
    EXPECT_EQ(over["selected_count"], 5);
    EXPECT_EQ(over["algorithm"], "tree");

    const auto f = run({"select", "--config", (cfg_dir / "run.json").string(), "--features",
                        "f0,f3", "--out", (dir / "fixed").string()});
    ASSERT_EQ(f.status, 0) << f.err;
    EXPECT_EQ(read_json(dir / "fixed" / "selection.json")["fs_method"], "fixed");
}

TEST_F(Cli, BenchWritesGridAndIsReproducible) {
    auto bench_args = [&](const char* jobs, const char* out) {
        return with_data({"bench", "--fs", "none,infogain,relief", "--algo", "tree,naive_bayes", "--k", "3",
                          "--jobs", jobs, "--out", (dir / out).string()});
    };
    const auto a = run(bench_args("3", "b1"));
    ASSERT_EQ(a.status, 0) << a.err;
    const auto bench = read_json(dir / "b1" / "bench.json");
    EXPECT_EQ(bench["cells"].size(), 6u);
    EXPECT_EQ(bench["averages"].size(), 3u);
    EXPECT_TRUE(fs::exists(dir / "b1" / "cells" / "relief_naive_bayes.json"));
    const auto md = read_text(dir / "b1" / "bench.md");
    EXPECT_NE(md.find("| Model | Metric | none | infogain | relief |"), std::string::npos);
    EXPECT_NE(md.find("| tree | ACC |"), std::string::npos);
    EXPECT_NE(md.find("| FS method | FS time (s) |"), std::string::npos);

    ASSERT_EQ(run(bench_args("1", "b2")).status, 0);
    const auto again = read_json(dir / "b2" / "bench.json");
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(again["cells"][i]["report"]["confusion"], bench["cells"][i]["report"]["confusion"]);
        EXPECT_EQ(again["cells"][i]["report"]["selected_features"], bench["cells"][i]["report"]["selected_features"]);
    }
}

TEST_F(Cli, BenchFailureExitsNonZero) {
    const auto r = run(with_data({"bench", "--fs", "infogain", "--algo", "tree,knn", "--k", "3", "--params",
                                  R"({"knn": {"k": 100000}})", "--out", (dir / "bad").string()}));
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("infogain x knn"), std::string::npos);
    const auto bench = read_json(dir / "bad" / "bench.json");
    EXPECT_TRUE(bench["cells"][0].contains("report"));
    EXPECT_TRUE(bench["cells"][1].contains("error"));
    EXPECT_NE(read_text(dir / "bad" / "bench.md").find("error"), std::string::npos);
}

TEST_F(Cli, BadInputsReportErrors) {
    EXPECT_NE(run({"select", "--bogus"}).status, 0);
    EXPECT_NE(run({}).status, 0);
    const auto unknown = run(with_data({"select", "--fs", "chi2"}));
    EXPECT_EQ(unknown.status, 1);
    EXPECT_EQ(unknown.err.rfind("error: ", 0), 0u);
    const auto missing = run({"evaluate", "--train", (dir / "nope.csv").string(), "--test", test_csv.string(),
                              "--schema", schema.string(), "--out", (dir / "x").string()});
    EXPECT_EQ(missing.status, 1);
    EXPECT_NE(missing.err.find("nope.csv"), std::string::npos);
    EXPECT_EQ(run(with_data({"train", "--params", "{not json"})).status, 1);
}

TEST_F(Cli, ExecutableRuns) {
    const std::string cmd = std::string("\"") + FSEL_IDS_CLI + "\" select --fs gainratio --k 2 --train \"" +
                            train_csv.string() + "\" --schema \"" + schema.string() + "\" --out \"" +
                            (dir / "exe").string() + "\" > \"" + (dir / "exe.log").string() + "\" 2>&1";
    EXPECT_EQ(std::system(cmd.c_str()), 0) << read_text(dir / "exe.log");
    EXPECT_EQ(read_json(dir / "exe" / "selection.json")["features"].size(), 2u);
}
