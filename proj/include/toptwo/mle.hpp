#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "toptwo/brent.hpp"
#include "toptwo/errors.hpp"
#include "toptwo/fw.hpp"

namespace toptwo {

enum class FitMethod { toptwo, maxonly };
enum class BlockMode { disjoint, sliding };

// Blockwise (max, second-max) pairs; the input of the top-two MLE.
struct TopTwoSample {
    std::vector<std::pair<double, double>> pairs;

    explicit TopTwoSample(std::vector<std::pair<double, double>> p)
        : pairs(std::move(p)) {
        if (pairs.empty()) throw insufficient_data_error("TopTwoSample: empty sample");
        for (const auto& [x, y] : pairs) {
            if (!(y > 0.0) || !(x >= y) || !std::isfinite(x))
                throw data_error("TopTwoSample: pairs must satisfy x >= y > 0 and be finite");
        }
    }

    std::size_t size() const { return pairs.size(); }

    // All pairs identical up to relative tolerance 1e-12; the MLE is
    // undefined on such samples.
    bool degenerate() const {
        const auto& [x0, y0] = pairs.front();
        const double scale = std::fmax(std::fabs(x0), 1.0);
        for (const auto& [x, y] : pairs) {
            if (std::fabs(x - x0) > 1e-12 * scale || std::fabs(y - y0) > 1e-12 * scale)
                return false;
        }
        return true;
    }
};

struct BiasCorrection {
    double rho0_hat;     // estimated cluster-size-one probability, in [0,1]
    double varpi_hat;    // root of Pi at rho0_hat, in (0,1]
    double factor_sigma; // scale multiplier {Upsilon(varpi)/2}^{1/alpha_hat}
};

struct FitResult {
    double alpha_hat = 0.0;
    double sigma_hat = 0.0;
    FitMethod method = FitMethod::toptwo;
    std::optional<BlockMode> blocks;
    std::optional<BiasCorrection> bias_corrected;
    double loglik = 0.0;
    int iterations = 0;
};

struct FitOptions {
    double alpha_lo = 0.01;  // initial bracket, expanded geometrically
    double alpha_hi = 100.0;
    double alpha_min = 1e-8; // expansion limits; beyond them the data are
    double alpha_max = 1e8;  // considered pathological
    double tol = 1e-10;      // on |Psi|
    int max_iter = 200;
};

// Power mean M_p(v) = (mean v_i^p)^{1/p}, evaluated in log space so that
// large |p| neither overflows nor underflows.
inline double power_mean(std::span<const double> values, double exponent) {
    if (values.empty()) throw domain_error("power_mean: empty input");
    if (exponent == 0.0) throw domain_error("power_mean: exponent must be non-zero");
    double lmin = std::numeric_limits<double>::infinity(), lmax = -lmin;
    std::vector<double> logs(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) throw domain_error("power_mean: values must be positive");
        logs[i] = std::log(values[i]);
        lmin = std::fmin(lmin, logs[i]);
        lmax = std::fmax(lmax, logs[i]);
    }
    const double shift = exponent > 0.0 ? exponent * lmax : exponent * lmin;
    double sum = 0.0;
    for (double l : logs) sum += std::exp(exponent * l - shift);
    return std::exp((shift + std::log(sum / values.size())) / exponent);
}

namespace detail {

// Shared state for repeated evaluations of the profile score: log-transformed
// data plus the shift that keeps exp(-alpha*log y) in range for any alpha.
struct ProfileData {
    std::vector<double> log_y;
    double log_y_min = 0.0;
    double mean_log_xy = 0.0; // mean of log(x_i * y_i); only log x for maxima

    static ProfileData from_pairs(const std::vector<std::pair<double, double>>& pairs) {
        ProfileData d;
        d.log_y.reserve(pairs.size());
        double acc = 0.0;
        for (const auto& [x, y] : pairs) {
            const double ly = std::log(y);
            d.log_y.push_back(ly);
            acc += std::log(x) + ly;
        }
        d.log_y_min = *std::min_element(d.log_y.begin(), d.log_y.end());
        d.mean_log_xy = acc / pairs.size();
        return d;
    }

    static ProfileData from_values(std::span<const double> values) {
        ProfileData d;
        d.log_y.reserve(values.size());
        double acc = 0.0;
        for (double v : values) {
            if (!(v > 0.0)) throw data_error("maxima must be positive");
            const double lv = std::log(v);
            d.log_y.push_back(lv);
            acc += lv;
        }
        d.log_y_min = *std::min_element(d.log_y.begin(), d.log_y.end());
        d.mean_log_xy = acc / values.size();
        return d;
    }

    // mean(y^-a * log y) / mean(y^-a) and mean(y^-a), shifted by y_min.
    void weighted_terms(double alpha, double& ratio, double& shifted_mean) const {
        double sw = 0.0, swl = 0.0;
        for (double l : log_y) {
            const double w = std::exp(-alpha * (l - log_y_min));
            sw += w;
            swl += w * l;
        }
        ratio = swl / sw;
        shifted_mean = sw / static_cast<double>(log_y.size());
    }

    // M_{-alpha}(y) without leaving log space.
    double neg_power_mean(double alpha, double shifted_mean) const {
        return std::exp(log_y_min - std::log(shifted_mean) / alpha);
    }
};

} // namespace detail

// Profile score Psi_k(alpha | z) whose unique root is the shape MLE:
//   2/alpha + 2 * M_{-alpha}^alpha(y) * mean(y^-alpha log y) - mean(log(x*y)).
inline double psi_k(double alpha, const TopTwoSample& sample) {
    if (!(alpha > 0.0)) throw domain_error("psi_k: alpha must be positive");
    if (sample.degenerate()) throw degeneracy_error("psi_k: degenerate sample");
    const auto d = detail::ProfileData::from_pairs(sample.pairs);
    double ratio, sm;
    d.weighted_terms(alpha, ratio, sm);
    return 2.0 / alpha + 2.0 * ratio - d.mean_log_xy;
}

// Independence log-likelihood of SW(alpha, sigma) on a top-two sample.
inline double log_likelihood(double alpha, double sigma, const TopTwoSample& sample) {
    if (!(alpha > 0.0) || !(sigma > 0.0))
        throw domain_error("log_likelihood: parameters must be positive");
    const double k = static_cast<double>(sample.size());
    const double log_sigma = std::log(sigma);
    double sum = 0.0;
    for (const auto& [x, y] : sample.pairs) {
        sum += (alpha + 1.0) * (std::log(x) + std::log(y)) +
               std::exp(alpha * (log_sigma - std::log(y)));
    }
    return 2.0 * k * std::log(alpha) + 2.0 * k * alpha * log_sigma - sum;
}

namespace detail {

template <class Score>
std::pair<double, int> solve_shape(Score&& score, const FitOptions& opts) {
    int evals = 0;
    auto counted = [&](double a) {
        ++evals;
        return score(a);
    };
    RootOptions ropts;
    ropts.ftol = opts.tol;
    ropts.max_iter = opts.max_iter;
    const double root = bracketed_root_decreasing(counted, opts.alpha_lo, opts.alpha_hi,
                                                  opts.alpha_min, opts.alpha_max, ropts);
    return {root, evals};
}

} // namespace detail

// Top-two pseudo-MLE for SW(alpha, sigma): alpha_hat is the root of Psi_k,
// sigma_hat = 2^{1/alpha_hat} * M_{-alpha_hat}(y).
inline FitResult fit_sw_mle(const TopTwoSample& sample, const FitOptions& opts = {}) {
    if (sample.size() < 2)
        throw insufficient_data_error("fit_sw_mle: need at least 2 pairs");
    if (sample.degenerate()) throw degeneracy_error("fit_sw_mle: degenerate sample");
    const auto d = detail::ProfileData::from_pairs(sample.pairs);
    double last_sm = 1.0;
    auto score = [&](double alpha) {
        double ratio, sm;
        d.weighted_terms(alpha, ratio, sm);
        last_sm = sm;
        return 2.0 / alpha + 2.0 * ratio - d.mean_log_xy;
    };
    auto [alpha_hat, evals] = detail::solve_shape(score, opts);
    score(alpha_hat); // refresh the shifted mean at the root
    FitResult fit;
    fit.method = FitMethod::toptwo;
    fit.alpha_hat = alpha_hat;
    fit.sigma_hat = std::exp2(1.0 / alpha_hat) * d.neg_power_mean(alpha_hat, last_sm);
    fit.loglik = log_likelihood(alpha_hat, fit.sigma_hat, sample);
    fit.iterations = evals;
    return fit;
}

// Max-only Frechet MLE baseline on a sample of block maxima.
inline FitResult fit_frechet_mle(std::span<const double> maxima, const FitOptions& opts = {}) {
    if (maxima.size() < 2)
        throw insufficient_data_error("fit_frechet_mle: need at least 2 maxima");
    const double scale = std::fmax(std::fabs(maxima[0]), 1.0);
    bool tied = true;
    for (double v : maxima) tied = tied && std::fabs(v - maxima[0]) <= 1e-12 * scale;
    if (tied) throw degeneracy_error("fit_frechet_mle: all maxima equal");

    const auto d = detail::ProfileData::from_values(maxima);
    double last_sm = 1.0;
    auto score = [&](double alpha) {
        double ratio, sm;
        d.weighted_terms(alpha, ratio, sm);
        last_sm = sm;
        return 1.0 / alpha + ratio - d.mean_log_xy;
    };
    auto [alpha_hat, evals] = detail::solve_shape(score, opts);
    score(alpha_hat);
    FitResult fit;
    fit.method = FitMethod::maxonly;
    fit.alpha_hat = alpha_hat;
    fit.sigma_hat = d.neg_power_mean(alpha_hat, last_sm);
    const double k = static_cast<double>(maxima.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < maxima.size(); ++i) {
        sum += (alpha_hat + 1.0) * d.log_y[i] +
               std::exp(alpha_hat * (std::log(fit.sigma_hat) - d.log_y[i]));
    }
    fit.loglik = k * std::log(alpha_hat) + k * alpha_hat * std::log(fit.sigma_hat) - sum;
    fit.iterations = evals;
    return fit;
}

} // namespace toptwo
