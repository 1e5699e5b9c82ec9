#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "toptwo/bias.hpp"
#include "toptwo/blocks.hpp"
#include "toptwo/errors.hpp"
#include "toptwo/mle.hpp"

namespace toptwo {

// The five estimation pipelines compared throughout: max-only and top-two,
// each with disjoint or sliding blocks, plus the mixed "best of two worlds"
// combination (top-two sliding shape, max-only sliding scale).
enum class Estimator { max_db, max_sb, tt_db, tt_sb, botw };

inline const char* estimator_name(Estimator e) {
    switch (e) {
        case Estimator::max_db: return "max_db";
        case Estimator::max_sb: return "max_sb";
        case Estimator::tt_db: return "tt_db";
        case Estimator::tt_sb: return "tt_sb";
        case Estimator::botw: return "botw";
    }
    return "?";
}

inline Estimator estimator_from_name(const std::string& s) {
    if (s == "max_db") return Estimator::max_db;
    if (s == "max_sb") return Estimator::max_sb;
    if (s == "tt_db") return Estimator::tt_db;
    if (s == "tt_sb") return Estimator::tt_sb;
    if (s == "botw") return Estimator::botw;
    throw config_error("unknown estimator: " + s);
}

struct PipelineOptions {
    double trunc_c = 1e-6;
    std::size_t r_prime = 0;  // 0: use max(2, r/2)
    bool bias_correct = true; // applies to the top-two pipelines
    FitOptions fit;
};

inline std::size_t default_r_prime(std::size_t r) { return std::max<std::size_t>(2, r / 2); }

// Run one of the four basic pipelines (extraction, fit, optional bias
// correction) on a raw series. botw has no single fit; see fit_return_level.
inline FitResult fit_series(std::span<const double> series, std::size_t r, Estimator est,
                            const PipelineOptions& opts = {}) {
    if (est == Estimator::botw)
        throw config_error("fit_series: botw is a return-level combination, not a fit");
    const BlockMode mode = (est == Estimator::max_sb || est == Estimator::tt_sb)
                               ? BlockMode::sliding
                               : BlockMode::disjoint;
    const BlockScheme scheme(mode, r, opts.trunc_c);
    FitResult fit;
    if (est == Estimator::max_db || est == Estimator::max_sb) {
        const auto maxima = extract_maxima(series, scheme);
        fit = fit_frechet_mle(maxima, opts.fit);
    } else {
        const auto sample = extract_top_two(series, scheme);
        fit = fit_sw_mle(sample, opts.fit);
        if (opts.bias_correct) {
            const std::size_t rp = opts.r_prime ? opts.r_prime : default_r_prime(r);
            fit = bias_correct_fit(fit, estimate_rho0(series, rp));
        }
    }
    fit.blocks = mode;
    return fit;
}

// Return level RL(T) = sigma * b_T^{-1/alpha} with b_T = -log(1 - 1/T).
inline double return_level(double alpha, double sigma, double T) {
    if (!(alpha > 0.0) || !(sigma > 0.0))
        throw domain_error("return_level: parameters must be positive");
    if (!(T >= 2.0)) throw domain_error("return_level: T must be at least 2");
    const double b_T = -std::log1p(-1.0 / T);
    return sigma * std::pow(b_T, -1.0 / alpha);
}

// Return period of a level: T with return_level(alpha, sigma, T) = level,
// i.e. 1 / (1 - exp(-(level/sigma)^{-alpha})).
inline double return_period(double alpha, double sigma, double level) {
    if (!(alpha > 0.0) || !(sigma > 0.0))
        throw domain_error("return_period: parameters must be positive");
    if (!(level > 0.0)) throw domain_error("return_period: level must be positive");
    return 1.0 / -std::expm1(-std::pow(level / sigma, -alpha));
}

struct ReturnLevelEstimate {
    double T = 0.0;
    std::size_t r = 0;
    double level = 0.0;
    Estimator method = Estimator::max_db;
    double alpha_hat = 0.0;
    double sigma_hat = 0.0;
    std::optional<std::pair<double, double>> ci;
    double ci_level = 0.0;
};

// Full pipeline from a raw series to an estimated (T, r) return level.
inline ReturnLevelEstimate fit_return_level(std::span<const double> series, std::size_t r,
                                            double T, Estimator est,
                                            const PipelineOptions& opts = {}) {
    if (series.size() < 2 * r)
        throw insufficient_data_error("fit_return_level: need at least 2 blocks");
    ReturnLevelEstimate out;
    out.T = T;
    out.r = r;
    out.method = est;
    if (est == Estimator::botw) {
        const FitResult tt = fit_series(series, r, Estimator::tt_sb, opts);
        const FitResult mx = fit_series(series, r, Estimator::max_sb, opts);
        out.alpha_hat = tt.alpha_hat;
        out.sigma_hat = mx.sigma_hat;
    } else {
        const FitResult fit = fit_series(series, r, est, opts);
        out.alpha_hat = fit.alpha_hat;
        out.sigma_hat = fit.sigma_hat;
    }
    out.level = return_level(out.alpha_hat, out.sigma_hat, T);
    return out;
}

} // namespace toptwo
