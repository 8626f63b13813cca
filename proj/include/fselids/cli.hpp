#pragma once

// Command implementations behind the fsel_ids executable. Each command reads
// a RunConfig (JSON file plus flag overrides), writes its artifacts under
// `out`, and throws fsel::Error on failure.

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fselids/evaluate.hpp"

namespace fsel {

struct RunConfig {
    PipelineConfig pipeline;
    std::filesystem::path out = "fsel_out";
    std::filesystem::path model_dir;  // evaluate: directory written by `train`
    std::size_t jobs = 1;
    std::vector<FsMethod> grid_fs;
    std::vector<Algorithm> grid_algorithms;
};

/// Reads config keys on top of `base`. Relative paths resolve against `base_dir`.
RunConfig run_config_from_json(const nlohmann::json& doc, RunConfig base = {},
                               const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

struct SelectOutput {
    Selection selection;
    std::vector<std::string> names;
};

struct TrainOutput {
    Selection selection;
    PreprocessPlan plan;
    TrainedModel model;
};

struct BenchCell {
    FsMethod fs = FsMethod::none;
    Algorithm algorithm = Algorithm::tree;
    std::optional<EvaluationReport> report;
    std::string error;
};

struct BenchAverage {
    FsMethod fs = FsMethod::none;
    double fs_seconds = 0.0;
    double mean_train_seconds = 0.0;    // averaged over algorithms
    double mean_overall_seconds = 0.0;  // fs + train + eval, averaged over algorithms
    std::size_t cells = 0;
};

struct BenchOutput {
    std::vector<BenchCell> cells;
    std::vector<BenchAverage> averages;

    bool all_succeeded() const;
};

SelectOutput cmd_select(const RunConfig& config);
TrainOutput cmd_train(const RunConfig& config);
EvaluationReport cmd_evaluate(const RunConfig& config);
BenchOutput cmd_bench(const RunConfig& config);

std::vector<BenchAverage> bench_averages(const std::vector<BenchCell>& cells);
/// One row per (algorithm, metric), one column per FS method.
std::string bench_markdown(const BenchOutput& bench);
nlohmann::json to_json(const BenchOutput& bench);

/// Parses argv, runs one command, and returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fsel
