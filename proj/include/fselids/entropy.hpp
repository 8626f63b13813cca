#pragma once

#include <cmath>
#include <span>

namespace fsel {

/// Shannon entropy in bits of a count vector; zero counts contribute nothing.
inline double entropy_from_counts(std::span<const double> counts) {
    double total = 0.0;
    for (double c : counts) total += c;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double c : counts) {
        if (c <= 0.0) continue;
        const double p = c / total;
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace fsel
