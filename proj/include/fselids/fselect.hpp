#pragma once

// Feature selection: entropy filters (information gain, gain ratio), the
// k-neighbour Relief ranker, and the decision-tree wrapper driven by a
// best-first forward search.

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fselids/classify.hpp"
#include "fselids/ingest.hpp"
#include "fselids/preprocess.hpp"

namespace fsel {

/// Shannon entropy (bits) of a sequence of class ids.
double entropy(std::span<const std::uint32_t> class_ids);
double entropy(std::span<const Label> labels);

struct FeatureScore {
    std::size_t feature = 0;
    double score = 0.0;
};

/// Scores sorted by descending score, ties by ascending feature index.
struct RankedScores {
    std::vector<FeatureScore> entries;
};

RankedScores make_ranking(std::vector<FeatureScore> scores);

/// H(class) - H(class | feature). Numeric features must be covered by `bins`.
double info_gain(const Dataset& ds, std::size_t feature, const DiscretizationPlan& bins);
/// info_gain / H(feature), or 0 when H(feature) = 0.
double gain_ratio(const Dataset& ds, std::size_t feature, const DiscretizationPlan& bins);

RankedScores info_gain_ranking(const Dataset& ds, const DiscretizationPlan& bins);
RankedScores gain_ratio_ranking(const Dataset& ds, const DiscretizationPlan& bins);

/// Rows visited by Relief: every row in order when samples >= n, otherwise a
/// seeded draw without replacement.
std::vector<std::size_t> relief_sample_rows(std::size_t n, std::size_t samples, std::uint64_t seed);

inline constexpr std::size_t kDefaultReliefNeighbors = 10;

/// k-neighbour Relief over every feature. Distances are the sum of per-feature
/// diffs (nominal: 0/1, numeric: |a-b| / range). For each sampled row the k
/// nearest hits subtract diff/(m*k) and the k nearest misses add it; neighbour
/// ties break by lower row index.
RankedScores relief_weights(const Dataset& ds, std::size_t samples, std::size_t neighbors, std::uint64_t seed,
                            std::size_t workers = 0);

/// The first k entries of the ranking.
FeatureSubset rank_top_k(const RankedScores& scores, std::size_t k);

/// Fold id per row: each class is shuffled with `seed` and dealt round-robin,
/// the deal continuing from where the previous class stopped.
std::vector<std::size_t> stratified_folds(std::span<const Label> labels, std::size_t folds, std::uint64_t seed);

inline constexpr std::size_t kDefaultFolds = 5;

/// Mean stratified k-fold accuracy of an unpruned evaluator tree (min_leaf 2)
/// restricted to `subset`.
double wrapper_merit(const Dataset& train, const FeatureSubset& subset, std::size_t folds, std::uint64_t seed);

struct SearchEvaluation {
    FeatureSubset subset;  // ascending
    double merit = 0.0;
    double seconds = 0.0;  // since search start
};

enum class StopReason { stale_limit, open_list_exhausted };

std::string_view to_string(StopReason reason);

struct SearchTrace {
    std::vector<SearchEvaluation> evaluations;
    std::size_t expansions = 0;
    std::size_t stale_expansions = 0;  // consecutive non-improving expansions at stop
    std::size_t best_found_at_depth = 0;
    StopReason stop_reason = StopReason::open_list_exhausted;
};

struct BestFirstOptions {
    std::size_t folds = kDefaultFolds;
    std::size_t stop_after = 5;  // 0 disables the stale-expansion rule
    double epsilon = 1e-5;
    std::uint64_t seed = 1;
    std::size_t workers = 0;
};

struct SearchResult {
    FeatureSubset subset;  // ascending
    double merit = 0.0;
    SearchTrace trace;
};

/// Forward best-first search from the empty set over every feature of `train`.
SearchResult best_first_search(const Dataset& train, const BestFirstOptions& options = {});

/// One JSON object per evaluation: {"subset": [names], "merit": m, "timestamp": s}.
void write_trace_jsonl(std::ostream& out, const SearchTrace& trace, const Dataset& ds);

}  // namespace fsel
