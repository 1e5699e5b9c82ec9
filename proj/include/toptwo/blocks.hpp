#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "toptwo/errors.hpp"
#include "toptwo/mle.hpp"

namespace toptwo {

// Block extraction scheme: disjoint blocks of size r or all n-r+1 sliding
// windows, with lower truncation at c so emitted values are positive.
struct BlockScheme {
    BlockMode mode = BlockMode::disjoint;
    std::size_t r = 2;
    double c = 1e-6;

    BlockScheme() = default;
    BlockScheme(BlockMode m, std::size_t block_size, double trunc = 1e-6)
        : mode(m), r(block_size), c(trunc) {
        if (r < 2) throw domain_error("BlockScheme: block size must be at least 2");
        if (!(c > 0.0)) throw domain_error("BlockScheme: truncation constant must be positive");
    }
};

namespace detail {

// Largest and second-largest of a multiset; ties are kept, so a block
// (7, 7) summarizes to {7, 7}.
struct TopTwo {
    double m1 = -std::numeric_limits<double>::infinity();
    double m2 = -std::numeric_limits<double>::infinity();

    static TopTwo single(double x) { return {x, -std::numeric_limits<double>::infinity()}; }

    void add(double x) {
        if (x > m1) {
            m2 = m1;
            m1 = x;
        } else if (x > m2) {
            m2 = x;
        }
    }

    // Merge of two disjoint multisets' summaries.
    static TopTwo merge(const TopTwo& a, const TopTwo& b) {
        if (a.m1 >= b.m1) return {a.m1, std::fmax(a.m2, b.m1)};
        return {b.m1, std::fmax(b.m2, a.m1)};
    }
};

inline void check_finite(std::span<const double> series) {
    for (double v : series)
        if (!std::isfinite(v)) throw data_error("series contains non-finite values");
}

// Top-two summaries of all sliding windows of length r, O(n): windows span a
// suffix of one length-r bucket and a prefix of the next, so per-bucket
// prefix/suffix summaries suffice (the two parts never overlap).
inline std::vector<TopTwo> sliding_top_two(std::span<const double> series, std::size_t r) {
    const std::size_t n = series.size();
    std::vector<TopTwo> prefix(n), suffix(n);
    for (std::size_t b = 0; b < n; b += r) {
        const std::size_t end = std::min(b + r, n);
        TopTwo acc;
        for (std::size_t i = b; i < end; ++i) {
            acc.add(series[i]);
            prefix[i] = acc;
        }
        acc = TopTwo{};
        for (std::size_t i = end; i-- > b;) {
            acc.add(series[i]);
            suffix[i] = acc;
        }
    }
    std::vector<TopTwo> out;
    out.reserve(n - r + 1);
    for (std::size_t i = 0; i + r <= n; ++i) {
        const std::size_t j = i + r - 1;
        out.push_back(i % r == 0 ? prefix[j] : TopTwo::merge(suffix[i], prefix[j]));
    }
    return out;
}

inline std::vector<TopTwo> block_top_two(std::span<const double> series, const BlockScheme& s) {
    check_finite(series);
    if (series.size() < s.r)
        throw insufficient_data_error("block extraction: series shorter than block size");
    if (s.mode == BlockMode::sliding) return sliding_top_two(series, s.r);
    std::vector<TopTwo> out;
    const std::size_t k = series.size() / s.r;
    out.reserve(k);
    for (std::size_t b = 0; b < k; ++b) {
        TopTwo acc;
        for (std::size_t i = b * s.r; i < (b + 1) * s.r; ++i) acc.add(series[i]);
        out.push_back(acc);
    }
    return out;
}

} // namespace detail

// Blockwise (max, second-max) pairs, truncated below at scheme.c.
inline TopTwoSample extract_top_two(std::span<const double> series, const BlockScheme& scheme) {
    const auto tops = detail::block_top_two(series, scheme);
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(tops.size());
    for (const auto& t : tops)
        pairs.emplace_back(std::fmax(t.m1, scheme.c), std::fmax(t.m2, scheme.c));
    return TopTwoSample(std::move(pairs));
}

// Blockwise maxima only (input of the max-only baseline).
inline std::vector<double> extract_maxima(std::span<const double> series,
                                          const BlockScheme& scheme) {
    const auto tops = detail::block_top_two(series, scheme);
    std::vector<double> maxima;
    maxima.reserve(tops.size());
    for (const auto& t : tops) maxima.push_back(std::fmax(t.m1, scheme.c));
    return maxima;
}

namespace detail {

// Quadratic reference implementation used to cross-check the rolling one.
inline std::vector<TopTwo> sliding_top_two_naive(std::span<const double> series,
                                                 std::size_t r) {
    std::vector<TopTwo> out;
    for (std::size_t i = 0; i + r <= series.size(); ++i) {
        TopTwo acc;
        for (std::size_t j = i; j < i + r; ++j) acc.add(series[j]);
        out.push_back(acc);
    }
    return out;
}

} // namespace detail

} // namespace toptwo
