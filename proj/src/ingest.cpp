#include "fselids/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace fsel {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::numeric: return "numeric";
        case FeatureKind::nominal: return "nominal";
        case FeatureKind::class_label: return "class";
        case FeatureKind::drop: return "drop";
    }
    return "?";
}

FeatureKind feature_kind_from_string(std::string_view token) {
    if (token == "numeric") return FeatureKind::numeric;
    if (token == "nominal") return FeatureKind::nominal;
    if (token == "class") return FeatureKind::class_label;
    if (token == "drop") return FeatureKind::drop;
    throw Error("unknown feature kind '" + std::string(token) + "'");
}

FeatureSchema::FeatureSchema(std::vector<SchemaEntry> entries) : entries_(std::move(entries)) {
    std::unordered_set<std::string> seen;
    std::size_t classes = 0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.name.empty()) throw Error("schema entry " + std::to_string(i) + " has an empty name");
        if (!seen.insert(e.name).second) throw Error("duplicate schema name '" + e.name + "'");
        if (e.kind == FeatureKind::class_label) {
            ++classes;
            class_index_ = i;
        }
    }
    if (classes != 1)
        throw Error("schema must have exactly one class column, found " + std::to_string(classes));
}

std::size_t FeatureSchema::count(FeatureKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.kind == kind; }));
}

std::optional<std::size_t> FeatureSchema::find(std::string_view name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].name == name) return i;
    return std::nullopt;
}

FeatureSchema parse_schema(std::string_view text) {
    std::vector<SchemaEntry> entries;
    std::size_t line_no = 0;
    bool first = true;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string_view::npos)
            throw Error("schema line " + std::to_string(line_no) + ": expected 'name,kind'");
        auto name = trim(line.substr(0, comma));
        auto kind = trim(line.substr(comma + 1));
        if (first && name == "name" && kind == "kind") {
            first = false;
            continue;
        }
        first = false;
        try {
            entries.push_back({std::string(name), feature_kind_from_string(kind)});
        } catch (const Error& e) {
            throw Error("schema line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return FeatureSchema(std::move(entries));
}

FeatureSchema read_schema_file(const std::filesystem::path& path) {
    return parse_schema(read_file(path));
}

Column Column::numeric(std::string name, std::vector<double> values) {
    Column c;
    c.name = std::move(name);
    c.kind = FeatureKind::numeric;
    c.values = std::move(values);
    return c;
}

Column Column::nominal(std::string name, std::vector<std::uint32_t> codes,
                       std::vector<std::string> categories) {
    Column c;
    c.name = std::move(name);
    c.kind = FeatureKind::nominal;
    c.codes = std::move(codes);
    c.categories = std::move(categories);
    return c;
}

std::uint32_t Column::code_of(std::string_view category) const {
    for (std::size_t i = 0; i < categories.size(); ++i)
        if (categories[i] == category) return static_cast<std::uint32_t>(i);
    return kUnknownCategory;
}

Dataset::Dataset(std::vector<Column> columns, std::vector<Label> labels, std::string name)
    : columns_(std::move(columns)), labels_(std::move(labels)), name_(std::move(name)) {
    std::unordered_set<std::string> seen;
    for (const auto& c : columns_) {
        if (c.kind != FeatureKind::numeric && c.kind != FeatureKind::nominal)
            throw Error("column '" + c.name + "' must be numeric or nominal");
        if (!seen.insert(c.name).second) throw Error("duplicate column '" + c.name + "'");
        if (c.size() != labels_.size())
            throw Error("column '" + c.name + "' has " + std::to_string(c.size()) + " rows, expected " +
                        std::to_string(labels_.size()));
        if (c.is_numeric()) {
            for (double v : c.values)
                if (!std::isfinite(v)) throw Error("column '" + c.name + "' holds a non-finite value");
        } else {
            for (auto code : c.codes)
                if (code != kUnknownCategory && code >= c.categories.size())
                    throw Error("column '" + c.name + "' holds an out-of-dictionary code");
        }
    }
}

const Column& Dataset::column(std::size_t index) const {
    if (index >= columns_.size()) throw Error("feature index " + std::to_string(index) + " out of range");
    return columns_[index];
}

std::optional<std::size_t> Dataset::find(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].name == name) return i;
    return std::nullopt;
}

std::size_t Dataset::index_of(std::string_view name) const {
    auto idx = find(name);
    if (!idx) throw Error("no feature named '" + std::string(name) + "'");
    return *idx;
}

FeatureSubset Dataset::all_features() const {
    FeatureSubset s(columns_.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = i;
    return s;
}

std::vector<std::string> Dataset::feature_names(const FeatureSubset& subset) const {
    std::vector<std::string> names;
    names.reserve(subset.size());
    for (auto i : subset) names.push_back(column(i).name);
    return names;
}

FeatureSubset Dataset::subset_from_names(std::span<const std::string> names) const {
    FeatureSubset s;
    s.reserve(names.size());
    for (const auto& n : names) s.push_back(index_of(n));
    check_subset(s);
    return s;
}

void Dataset::check_subset(const FeatureSubset& subset) const {
    std::vector<bool> used(columns_.size(), false);
    for (auto i : subset) {
        if (i >= columns_.size()) throw Error("feature index " + std::to_string(i) + " out of range");
        if (used[i]) throw Error("feature index " + std::to_string(i) + " repeated in subset");
        used[i] = true;
    }
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
    std::vector<Column> cols;
    cols.reserve(columns_.size());
    for (const auto& c : columns_) {
        Column out;
        out.name = c.name;
        out.kind = c.kind;
        out.categories = c.categories;
        if (c.is_numeric()) {
            out.values.reserve(rows.size());
            for (auto r : rows) out.values.push_back(c.values.at(r));
        } else {
            out.codes.reserve(rows.size());
            for (auto r : rows) out.codes.push_back(c.codes.at(r));
        }
        cols.push_back(std::move(out));
    }
    std::vector<Label> labels;
    labels.reserve(rows.size());
    for (auto r : rows) labels.push_back(labels_.at(r));
    return Dataset(std::move(cols), std::move(labels), name_);
}

Dataset Dataset::select_features(const FeatureSubset& subset) const {
    check_subset(subset);
    std::vector<Column> cols;
    cols.reserve(subset.size());
    for (auto i : subset) cols.push_back(columns_[i]);
    return Dataset(std::move(cols), labels_, name_);
}

Dataset Dataset::with_name(std::string name) const {
    Dataset d = *this;
    d.name_ = std::move(name);
    return d;
}

std::vector<std::string> split_csv_record(std::string_view line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else if (ch != '\r') {
            cell.push_back(ch);
        }
    }
    if (quoted) throw Error("unterminated quoted field");
    cells.push_back(std::move(cell));
    return cells;
}

Dataset parse_csv(std::string_view text, const FeatureSchema& schema, const LoadOptions& options,
                  std::string name) {
    const auto& entries = schema.entries();
    struct Builder {
        std::size_t csv_index;
        Column column;
        std::unordered_map<std::string, std::uint32_t> dictionary;
        bool frozen = false;
    };
    std::vector<Builder> builders;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.kind != FeatureKind::numeric && e.kind != FeatureKind::nominal) continue;
        Builder b{i, {}, {}, false};
        b.column.name = e.name;
        b.column.kind = e.kind;
        if (e.kind == FeatureKind::nominal && options.vocabulary) {
            const auto& vocab = options.vocabulary->column(options.vocabulary->index_of(e.name));
            if (!vocab.is_nominal()) throw Error("vocabulary column '" + e.name + "' is not nominal");
            b.column.categories = vocab.categories;
            for (std::size_t c = 0; c < vocab.categories.size(); ++c)
                b.dictionary.emplace(vocab.categories[c], static_cast<std::uint32_t>(c));
            b.frozen = true;
        }
        builders.push_back(std::move(b));
    }
    std::vector<Label> labels;
    const std::size_t class_col = schema.class_index();

    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        auto cells = split_csv_record(line);
        if (cells.size() != entries.size())
            throw Error("line " + std::to_string(line_no) + ": expected " + std::to_string(entries.size()) +
                        " columns, found " + std::to_string(cells.size()));
        if (!header_seen) {
            for (std::size_t i = 0; i < entries.size(); ++i)
                if (std::string(trim(cells[i])) != entries[i].name)
                    throw Error("header column " + std::to_string(i + 1) + " is '" + cells[i] +
                                "', schema expects '" + entries[i].name + "'");
            header_seen = true;
            continue;
        }
        auto label_cell = trim(cells[class_col]);
        if (label_cell == options.positive_label)
            labels.push_back(Label::attack);
        else if (label_cell == options.negative_label)
            labels.push_back(Label::normal);
        else
            throw Error("line " + std::to_string(line_no) + ": unknown label value '" + std::string(label_cell) +
                        "'");
        for (auto& b : builders) {
            auto cell = trim(cells[b.csv_index]);
            if (cell.empty())
                throw Error("line " + std::to_string(line_no) + ", column '" + b.column.name + "': missing value");
            if (b.column.is_numeric()) {
                double v = 0.0;
                auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
                    throw Error("line " + std::to_string(line_no) + ", column '" + b.column.name +
                                "': cannot parse '" + std::string(cell) + "' as a finite number");
                b.column.values.push_back(v);
            } else {
                std::string key(cell);
                auto it = b.dictionary.find(key);
                if (it != b.dictionary.end()) {
                    b.column.codes.push_back(it->second);
                } else if (b.frozen) {
                    b.column.codes.push_back(kUnknownCategory);
                } else {
                    auto code = static_cast<std::uint32_t>(b.column.categories.size());
                    b.dictionary.emplace(key, code);
                    b.column.categories.push_back(std::move(key));
                    b.column.codes.push_back(code);
                }
            }
        }
    }
    if (!header_seen) throw Error("CSV has no header row");
    std::vector<Column> columns;
    columns.reserve(builders.size());
    for (auto& b : builders) columns.push_back(std::move(b.column));
    return Dataset(std::move(columns), std::move(labels), std::move(name));
}

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema, const LoadOptions& options) {
    try {
        return parse_csv(read_file(path), schema, options, path.stem().string());
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

ClassDistribution class_distribution(const Dataset& ds) {
    if (ds.empty()) throw Error("class distribution of an empty dataset");
    ClassDistribution d;
    for (auto l : ds.labels()) (l == Label::attack ? d.attack : d.normal)++;
    const double n = static_cast<double>(ds.rows());
    d.attack_percent = 100.0 * static_cast<double>(d.attack) / n;
    d.normal_percent = 100.0 * static_cast<double>(d.normal) / n;
    return d;
}

std::vector<std::size_t> stratified_subsample_rows(const Dataset& ds, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw Error("subsample fraction must lie in (0, 1], got " + std::to_string(fraction));
    std::vector<std::size_t> rows;
    if (fraction == 1.0) {
        rows.resize(ds.rows());
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        return rows;
    }
    std::mt19937_64 rng(seed);
    for (auto cls : {Label::normal, Label::attack}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < ds.rows(); ++i)
            if (ds.label(i) == cls) members.push_back(i);
        if (members.empty()) continue;
        auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
        if (keep < 2)
            throw Error("class '" + std::string(cls == Label::attack ? "attack" : "normal") +
                        "' has too few rows for subsample fraction " + std::to_string(fraction));
        std::shuffle(members.begin(), members.end(), rng);
        rows.insert(rows.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(keep));
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

Dataset stratified_subsample(const Dataset& ds, double fraction, std::uint64_t seed) {
    auto rows = stratified_subsample_rows(ds, fraction, seed);
    return ds.select_rows(rows);
}

}  // namespace fsel
