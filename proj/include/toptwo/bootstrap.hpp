#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "toptwo/errors.hpp"
#include "toptwo/rng.hpp"

namespace toptwo {

// Type-7 empirical quantile (linear interpolation between order statistics).
// Fixed convention; it affects CI endpoints at small B.
inline double quantile(std::span<const double> values, double p) {
    if (values.empty()) throw domain_error("quantile: empty input");
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("quantile: p must lie in [0,1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

// Basic bootstrap interval at level q: reflect the bootstrap quantiles
// around the point estimate.
inline std::pair<double, double> basic_ci(double point, std::span<const double> replicates,
                                          double q) {
    if (replicates.empty()) throw domain_error("basic_ci: no replicates");
    if (!(q > 0.0 && q < 1.0)) throw domain_error("basic_ci: level must lie in (0,1)");
    const double up = quantile(replicates, 0.5 * (1.0 + q));
    const double dn = quantile(replicates, 0.5 * (1.0 - q));
    return {2.0 * point - up, 2.0 * point - dn};
}

struct BootstrapResult {
    double point = 0.0;
    std::vector<double> replicates;
    std::pair<double, double> ci_basic{std::numeric_limits<double>::quiet_NaN(),
                                       std::numeric_limits<double>::quiet_NaN()};
    double ci_level = 0.0;
};

// Circular block bootstrap: extend the series with its first r-1 values,
// draw ceil(n/r) block start indices uniformly from {0,...,n-1}, concatenate
// the length-r blocks and truncate to length n. Every cyclic block is
// available and replicates have the original length, so block counts match
// the original estimator.
inline std::vector<double> circular_block_resample(std::span<const double> series,
                                                   std::size_t r, Rng& rng) {
    const std::size_t n = series.size();
    std::vector<double> replicate;
    replicate.reserve(n);
    const std::size_t blocks = (n + r - 1) / r;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t start = static_cast<std::size_t>(rng.uniform_below(n));
        for (std::size_t j = 0; j < r && replicate.size() < n; ++j) {
            const std::size_t idx = start + j;
            replicate.push_back(series[idx < n ? idx : idx - n]);
        }
    }
    return replicate;
}

inline BootstrapResult
circular_block_bootstrap(std::span<const double> series, std::size_t r, std::size_t B,
                         const std::function<double(std::span<const double>)>& statistic,
                         Rng& rng, double ci_level = 0.95) {
    if (series.size() < 2 * r)
        throw insufficient_data_error("circular_block_bootstrap: need at least 2 blocks");
    if (B < 1) throw config_error("circular_block_bootstrap: B must be at least 1");
    BootstrapResult out;
    out.point = statistic(series);
    out.replicates.reserve(B);
    for (std::size_t b = 0; b < B; ++b) {
        const auto replicate = circular_block_resample(series, r, rng);
        out.replicates.push_back(statistic(replicate));
    }
    if (B >= 50) {
        out.ci_basic = basic_ci(out.point, out.replicates, ci_level);
        out.ci_level = ci_level;
    }
    return out;
}

} // namespace toptwo
