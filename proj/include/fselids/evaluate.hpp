#pragma once

// Hold-out evaluation: confusion matrix, ACC / DR / FAR, phase timings, and
// the end-to-end pipeline load -> select -> fit transforms -> train ->
// transform test -> predict -> score.

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fselids/classify.hpp"
#include "fselids/fselect.hpp"
#include "fselids/ingest.hpp"
#include "fselids/preprocess.hpp"

namespace fsel {

/// Positive class is attack.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
    std::size_t positives() const { return tp + fn; }
    std::size_t negatives() const { return fp + tn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> truth,
                          Label positive = Label::attack);

/// Percentages in [0, 100].
double accuracy(const ConfusionMatrix& cm);
double detection_rate(const ConfusionMatrix& cm);
double false_alarm_rate(const ConfusionMatrix& cm);

enum class FsMethod { none, wrapper, infogain, gainratio, relief, fixed };

std::string_view to_string(FsMethod method);
FsMethod fs_method_from_string(std::string_view token);
bool is_filter(FsMethod method);

inline constexpr std::size_t kDefaultSelectCount = 19;

struct PipelineConfig {
    std::filesystem::path train_path;
    std::filesystem::path test_path;
    std::filesystem::path schema_path;
    std::string positive_label = "1";
    std::string negative_label = "0";

    FsMethod fs = FsMethod::none;
    std::size_t k = kDefaultSelectCount;
    std::vector<std::string> features;  // used by FsMethod::fixed
    std::size_t bins = kDefaultBins;
    std::size_t relief_samples = 0;     // 0 = every training row
    std::size_t relief_neighbors = kDefaultReliefNeighbors;
    std::size_t folds = kDefaultFolds;
    std::size_t stop_after = 5;
    double epsilon = 1e-5;

    TrainParams params;                 // params.seed is the run seed
    double subsample = 1.0;             // stratified fraction of the training split
};

struct Selection {
    FeatureSubset subset;
    double fs_seconds = 0.0;
    std::optional<RankedScores> ranking;
    std::optional<SearchResult> search;
};

/// Runs the configured selection method on the (raw) training split.
Selection select_features(const Dataset& train, const PipelineConfig& config);

struct PhaseTimings {
    double fs_seconds = 0.0;
    double train_seconds = 0.0;  // transform fitting + model training
    double eval_seconds = 0.0;   // test transform + prediction

    double overall() const { return fs_seconds + train_seconds + eval_seconds; }
};

struct EvaluationReport {
    std::string dataset;
    std::string fs_method;
    std::vector<std::string> selected_features;
    std::size_t encoded_width = 0;
    std::string algorithm;
    ConfusionMatrix cm;
    double acc = 0.0;
    double dr = 0.0;
    double far = 0.0;
    PhaseTimings timings;

    std::size_t selected_count() const { return selected_features.size(); }
};

EvaluationReport make_report(const ConfusionMatrix& cm);

/// ACC recomputed from DR and FAR: (DR*P + (100-FAR)*N) / (P+N).
double accuracy_from_rates(const EvaluationReport& report);

struct PipelineRun {
    EvaluationReport report;
    Selection selection;
    PreprocessPlan plan;
    TrainedModel model;
};

/// Splits are used as given; `train` is subsampled when config.subsample < 1.
/// A precomputed selection skips the selection stage (its time is reused).
PipelineRun run_pipeline(const Dataset& train, const Dataset& test, const PipelineConfig& config,
                         const Selection* precomputed = nullptr);
/// Loads both CSVs (test with the training dictionaries) and runs the pipeline.
PipelineRun run_pipeline(const PipelineConfig& config);

/// Loads the training split; subsamples when configured.
Dataset load_training_split(const PipelineConfig& config, const FeatureSchema& schema);
Dataset load_test_split(const PipelineConfig& config, const FeatureSchema& schema, const Dataset& train);

nlohmann::json to_json(const EvaluationReport& report);
/// Strict reader: throws when a documented field is missing or mistyped.
EvaluationReport evaluation_report_from_json(const nlohmann::json& doc);

std::string markdown_header();
/// `| model | FS method | ACC | DR | FAR |` with two decimals.
std::string to_markdown_row(const EvaluationReport& report);

}  // namespace fsel
