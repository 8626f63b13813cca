#pragma once

// Schema-typed CSV loading into a columnar dataset, plus the row-level
// utilities (class distribution, stratified subsampling) used by every
// downstream stage.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fselids/common.hpp"

namespace fsel {

enum class FeatureKind { numeric, nominal, class_label, drop };

std::string_view to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(std::string_view token);

/// Binary traffic label. `attack` is the positive class for all metric math.
enum class Label : std::uint8_t { normal = 0, attack = 1 };

inline constexpr std::size_t kNumLabels = 2;

inline std::size_t label_index(Label l) { return static_cast<std::size_t>(l); }

struct SchemaEntry {
    std::string name;
    FeatureKind kind;
};

/// Ordered description of every CSV column. Exactly one entry is the class.
class FeatureSchema {
public:
    FeatureSchema() = default;
    explicit FeatureSchema(std::vector<SchemaEntry> entries);

    const std::vector<SchemaEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t class_index() const { return class_index_; }
    std::size_t count(FeatureKind kind) const;
    std::optional<std::size_t> find(std::string_view name) const;

private:
    std::vector<SchemaEntry> entries_;
    std::size_t class_index_ = 0;
};

/// Parses `name,kind` lines. Blank lines and `#` comments are ignored and a
/// leading `name,kind` header line is optional.
FeatureSchema parse_schema(std::string_view text);
FeatureSchema read_schema_file(const std::filesystem::path& path);

/// Code assigned to nominal values absent from the column dictionary
/// (unseen test categories).
inline constexpr std::uint32_t kUnknownCategory = std::numeric_limits<std::uint32_t>::max();

/// One retained input column. Numeric columns use `values`; nominal columns
/// use `codes` indexing into `categories` (first-occurrence order).
struct Column {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    std::vector<double> values;
    std::vector<std::uint32_t> codes;
    std::vector<std::string> categories;

    static Column numeric(std::string name, std::vector<double> values);
    static Column nominal(std::string name, std::vector<std::uint32_t> codes,
                          std::vector<std::string> categories);

    bool is_numeric() const { return kind == FeatureKind::numeric; }
    bool is_nominal() const { return kind == FeatureKind::nominal; }
    std::size_t size() const { return is_numeric() ? values.size() : codes.size(); }
    /// Code for a category string, or kUnknownCategory.
    std::uint32_t code_of(std::string_view category) const;
};

/// Ordered set of feature (column) indices into a Dataset.
using FeatureSubset = std::vector<std::size_t>;

/// Immutable columnar table of input features plus binary labels.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<Column> columns, std::vector<Label> labels, std::string name = {});

    const std::string& name() const { return name_; }
    std::size_t rows() const { return labels_.size(); }
    std::size_t features() const { return columns_.size(); }
    bool empty() const { return labels_.empty(); }

    const Column& column(std::size_t index) const;
    const std::vector<Column>& columns() const { return columns_; }
    std::span<const Label> labels() const { return labels_; }
    Label label(std::size_t row) const { return labels_[row]; }

    std::optional<std::size_t> find(std::string_view name) const;
    /// Like find() but throws when the name is absent.
    std::size_t index_of(std::string_view name) const;

    FeatureSubset all_features() const;
    std::vector<std::string> feature_names(const FeatureSubset& subset) const;
    FeatureSubset subset_from_names(std::span<const std::string> names) const;
    /// Throws unless every index is valid and unique.
    void check_subset(const FeatureSubset& subset) const;

    Dataset select_rows(std::span<const std::size_t> rows) const;
    Dataset select_features(const FeatureSubset& subset) const;
    Dataset with_name(std::string name) const;

private:
    std::vector<Column> columns_;
    std::vector<Label> labels_;
    std::string name_;
};

struct LoadOptions {
    std::string positive_label = "1";
    std::string negative_label = "0";
    /// When set, nominal dictionaries are taken from this dataset (matched by
    /// column name) and values absent from them become kUnknownCategory.
    const Dataset* vocabulary = nullptr;
};

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                 const LoadOptions& options = {});
Dataset parse_csv(std::string_view text, const FeatureSchema& schema,
                  const LoadOptions& options = {}, std::string name = {});

/// Splits one CSV record (RFC-4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_record(std::string_view line);

struct ClassDistribution {
    std::size_t normal = 0;
    std::size_t attack = 0;
    double normal_percent = 0.0;
    double attack_percent = 0.0;

    std::size_t total() const { return normal + attack; }
    std::size_t count(Label l) const { return l == Label::attack ? attack : normal; }
};

ClassDistribution class_distribution(const Dataset& ds);

/// Row indices kept by stratified_subsample, ascending.
std::vector<std::size_t> stratified_subsample_rows(const Dataset& ds, double fraction,
                                                   std::uint64_t seed);
/// Keeps round(fraction * n_c) rows of each class c, chosen by a seeded shuffle.
Dataset stratified_subsample(const Dataset& ds, double fraction, std::uint64_t seed);

}  // namespace fsel
