#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fselids/ingest.hpp"

namespace fsel::testkit {

struct RandomSpec {
    std::size_t rows = 120;
    std::size_t features = 6;
    double nominal_share = 0.4;
    std::size_t min_per_class = 12;
    std::size_t distinct_values = 12;  // small pools force ties
    std::uint64_t layout_seed = 0;     // column kinds and arities; 0 = use the data seed
};

/// Mixed-type dataset whose labels depend noisily on the first two features.
inline Dataset random_dataset(std::uint64_t seed, const RandomSpec& spec = {}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = spec.rows;
    std::vector<Label> labels(n);
    std::vector<double> signal(n);
    for (std::size_t r = 0; r < n; ++r) signal[r] = u(rng);
    for (std::size_t r = 0; r < n; ++r) labels[r] = (signal[r] + 0.35 * u(rng) > 0.65) ? Label::attack : Label::normal;
    // Guarantee both classes are well populated.
    for (std::size_t r = 0; r < spec.min_per_class && r < n; ++r) labels[r] = Label::normal;
    for (std::size_t r = spec.min_per_class; r < 2 * spec.min_per_class && r < n; ++r) labels[r] = Label::attack;

    std::mt19937_64 layout(spec.layout_seed ? spec.layout_seed : seed);
    std::vector<Column> cols;
    for (std::size_t f = 0; f < spec.features; ++f) {
        const std::string name = "f" + std::to_string(f);
        const bool nominal = u(layout) < spec.nominal_share;
        const std::size_t k = 2 + static_cast<std::size_t>(u(layout) * 4.0);
        const double weight = f < 2 ? 0.7 : 0.0;
        if (nominal) {
            std::vector<std::string> cats;
            for (std::size_t c = 0; c < k; ++c) cats.push_back("c" + std::to_string(c));
            std::vector<std::uint32_t> codes(n);
            for (std::size_t r = 0; r < n; ++r) {
                const double z = weight * signal[r] + (1.0 - weight) * u(rng);
                codes[r] = static_cast<std::uint32_t>(std::min<double>(static_cast<double>(k) - 1.0, z * static_cast<double>(k)));
            }
            // Categories are listed in first-occurrence order like the loader produces.
            std::vector<std::uint32_t> remap(k, kUnknownCategory);
            std::vector<std::string> ordered;
            for (auto& c : codes) {
                if (remap[c] == kUnknownCategory) {
                    remap[c] = static_cast<std::uint32_t>(ordered.size());
                    ordered.push_back(cats[c]);
                }
                c = remap[c];
            }
            cols.push_back(Column::nominal(name, std::move(codes), std::move(ordered)));
        } else {
            std::vector<double> values(n);
            const double pool = static_cast<double>(spec.distinct_values);
            for (std::size_t r = 0; r < n; ++r) {
                const double z = weight * signal[r] + (1.0 - weight) * u(rng);
                values[r] = std::floor(z * pool) * 1.5 - 3.0;
            }
            cols.push_back(Column::numeric(name, std::move(values)));
        }
    }
    return Dataset(std::move(cols), std::move(labels), "random" + std::to_string(seed));
}

/// Purely numeric variant, as consumed by the vector-space learners.
inline Dataset random_numeric_dataset(std::uint64_t seed, std::size_t rows, std::size_t features) {
    RandomSpec spec;
    spec.rows = rows;
    spec.features = features;
    spec.nominal_share = 0.0;
    spec.distinct_values = 1000;
    return random_dataset(seed, spec);
}

/// Writes a dataset to CSV with a schema file; returns {csv, schema}.
inline std::pair<std::filesystem::path, std::filesystem::path> write_csv(const Dataset& ds,
                                                                         const std::filesystem::path& dir,
                                                                         const std::string& stem) {
    std::filesystem::create_directories(dir);
    const auto csv = dir / (stem + ".csv");
    const auto schema = dir / (stem + ".schema");
    std::ofstream s(schema);
    s << "name,kind\nid,drop\n";
    for (const auto& c : ds.columns()) s << c.name << ',' << (c.is_numeric() ? "numeric" : "nominal") << '\n';
    s << "label,class\n";
    std::ofstream out(csv);
    out << "id";
    for (const auto& c : ds.columns()) out << ',' << c.name;
    out << ",label\n";
    out.precision(17);
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        out << r;
        for (const auto& c : ds.columns()) {
            if (c.is_numeric())
                out << ',' << c.values[r];
            else
                out << ',' << c.categories[c.codes[r]];
        }
        out << ',' << (ds.label(r) == Label::attack ? 1 : 0) << '\n';
    }
    return {csv, schema};
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("fselids_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fsel::testkit
