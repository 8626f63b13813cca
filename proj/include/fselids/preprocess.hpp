#pragma once

// Fitted, replayable transforms. The fixed application order is
// select -> min-max normalize -> one-hot encode; the equal-frequency
// discretizer exists only to feed the entropy-based filter scorers.

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "fselids/ingest.hpp"

namespace fsel {

struct MinMaxRange {
    std::string feature;
    double min = 0.0;
    double max = 0.0;
};

struct MinMaxParams {
    std::vector<MinMaxRange> ranges;
};

struct OneHotFeature {
    std::string feature;
    std::vector<std::string> categories;
};

struct OneHotPlan {
    std::vector<OneHotFeature> features;

    /// Number of indicator columns produced, i.e. the sum of category counts.
    std::size_t indicator_width() const;
};

struct BinBoundaries {
    std::string feature;
    std::vector<double> boundaries;  // strictly increasing; value <= b[i] falls left of b[i]

    std::size_t bins() const { return boundaries.size() + 1; }
    std::uint32_t bin_of(double value) const;
};

struct DiscretizationPlan {
    std::vector<BinBoundaries> features;

    const BinBoundaries* find(std::string_view feature) const;
};

inline constexpr std::size_t kDefaultBins = 10;

struct PreprocessPlan {
    std::vector<std::string> selected_features;
    MinMaxParams minmax;
    OneHotPlan onehot;
    std::optional<DiscretizationPlan> discretization;
};

MinMaxParams fit_minmax(const Dataset& train, const FeatureSubset& features);
/// x -> (x - min) / (max - min) clamped to [0, 1]; constant features map to 0.
/// Features not named in `params` pass through.
Dataset apply_minmax(const Dataset& ds, const MinMaxParams& params);

OneHotPlan fit_onehot(const Dataset& train, const FeatureSubset& features);
/// Replaces each planned nominal column with one indicator column per
/// category, in place. Unseen categories produce an all-zero block.
Dataset apply_onehot(const Dataset& ds, const OneHotPlan& plan);

/// Equal-frequency boundaries; ties at a cut move the cut to the next value
/// change so equal values never straddle a boundary.
DiscretizationPlan fit_discretizer(const Dataset& train, const FeatureSubset& features,
                                   std::size_t bins = kDefaultBins);
/// Replaces planned numeric columns with nominal bin-id columns ("bin0", ...).
Dataset apply_discretizer(const Dataset& ds, const DiscretizationPlan& plan);

/// Fits min-max on the numeric and one-hot on the nominal members of `subset`.
PreprocessPlan fit_preprocess(const Dataset& train, const FeatureSubset& subset);
Dataset apply_preprocess(const Dataset& ds, const PreprocessPlan& plan);

/// Width after one-hot encoding: numeric count + sum of category counts.
std::size_t encoded_width(const Dataset& ds, const FeatureSubset& subset);

inline constexpr int kPlanFormatVersion = 1;

nlohmann::json to_json(const PreprocessPlan& plan);
PreprocessPlan preprocess_plan_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const DiscretizationPlan& plan);
DiscretizationPlan discretization_plan_from_json(const nlohmann::json& doc);

}  // namespace fsel
