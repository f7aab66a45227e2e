#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <cstdint>
#include <span>

namespace testing_stats {

/// Pearson statistic of observed counts against expected probabilities.
inline double chi_square(std::span<const uint64_t> counts, std::span<const double> probs) {
    uint64_t total = 0;
    for (auto c : counts) total += c;
    double stat = 0;
    for (size_t k = 0; k < counts.size(); ++k) {
        const double e = probs[k] * static_cast<double>(total);
        const double d = static_cast<double>(counts[k]) - e;
        stat += d * d / e;
    }
    return stat;
}

inline double chi_square_critical(unsigned dof, double alpha) {
    return boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), alpha));
}

}  // namespace testing_stats
