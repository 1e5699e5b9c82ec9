#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "toptwo/errors.hpp"
#include "toptwo/rng.hpp"
#include "toptwo/special.hpp"

namespace toptwo {

enum class ModelKind { iid_pareto, armax_pareto, ar_pareto };

// Specification of a heavy-tailed stationary generator. All three models have
// exact Pareto(alpha) marginals F_alpha(x) = 1 - x^{-alpha} on [1, inf).
struct ModelSpec {
    ModelKind kind = ModelKind::iid_pareto;
    double alpha = 1.0;
    double beta = 0.0;         // temporal dependence (armax/ar only)
    std::size_t burn_in = 0;
    std::uint64_t seed = 0;

    static ModelSpec iid(double alpha, std::uint64_t seed = 0) {
        if (!(alpha > 0.0)) throw config_error("ModelSpec: alpha must be positive");
        return {ModelKind::iid_pareto, alpha, 0.0, 0, seed};
    }

    static ModelSpec armax(double alpha, double beta, std::uint64_t seed = 0,
                           std::size_t burn_in = 1000) {
        if (!(alpha > 0.0)) throw config_error("ModelSpec: alpha must be positive");
        if (!(beta > 0.0 && beta <= 1.0))
            throw config_error("ModelSpec: armax beta must lie in (0,1]");
        return {ModelKind::armax_pareto, alpha, beta, burn_in, seed};
    }

    static ModelSpec ar(double alpha, double beta, std::uint64_t seed = 0,
                        std::size_t burn_in = 1000) {
        if (!(alpha > 0.0)) throw config_error("ModelSpec: alpha must be positive");
        if (!(beta > 0.0 && beta < 1.0))
            throw config_error("ModelSpec: ar beta must lie in (0,1)");
        return {ModelKind::ar_pareto, alpha, beta, burn_in, seed};
    }
};

// Known limit parameters of a model: tail index alpha0 and, where the theory
// provides it, rho0 = rho(0) (1 for iid; 1-beta for the ARMAX kink function;
// unknown for the AR model).
struct SeriesMeta {
    double true_alpha0 = 1.0;
    std::optional<double> true_rho0;
};

inline SeriesMeta model_meta(const ModelSpec& spec) {
    switch (spec.kind) {
        case ModelKind::iid_pareto: return {spec.alpha, 1.0};
        case ModelKind::armax_pareto: return {spec.alpha, 1.0 - spec.beta};
        case ModelKind::ar_pareto: return {spec.alpha, std::nullopt};
    }
    return {};
}

namespace detail {

inline double pareto_quantile(double u, double alpha) {
    // F_alpha^{-1}(u) = (1-u)^{-1/alpha}
    return std::pow(1.0 - u, -1.0 / alpha);
}

inline double std_frechet(Rng& rng) { return -1.0 / std::log(rng.uniform()); }

inline double std_cauchy(Rng& rng) { return std::tan(pi * (rng.uniform() - 0.5)); }

// Stateful single-step simulators of the latent recursions, so both full
// series and streaming block maxima share one code path.
struct ArmaxState {
    double beta;
    double latent;

    explicit ArmaxState(double b, Rng& rng) : beta(b), latent(std_frechet(rng)) {}

    double step(Rng& rng) {
        latent = std::fmax(beta * latent, (1.0 - beta) * std_frechet(rng));
        return latent;
    }

    // Probability integral transform through the standard Frechet marginal.
    double emit(double alpha) const {
        return std::pow(-std::expm1(-1.0 / latent), -1.0 / alpha);
    }
};

struct ArState {
    double beta;
    double scale; // stationary Cauchy scale 1/(1-beta)
    double latent;

    explicit ArState(double b, Rng& rng)
        : beta(b), scale(1.0 / (1.0 - b)), latent(scale * std_cauchy(rng)) {}

    double step(Rng& rng) {
        latent = beta * latent + std_cauchy(rng);
        return latent;
    }

    // PIT through the stationary Cauchy(0, 1/(1-beta)) law. The upper tail
    // probability is written as atan(scale/x)/pi to keep precision for the
    // extreme values that drive the block maxima.
    double emit(double alpha) const {
        const double tail = latent > 0.0
                                ? std::atan(scale / latent) / pi
                                : 0.5 + std::atan(-latent / scale) / pi;
        return std::pow(tail, -1.0 / alpha);
    }
};

} // namespace detail

// Simulate n observations from the model, using the supplied rng stream.
inline std::vector<double> simulate(const ModelSpec& spec, std::size_t n, Rng& rng) {
    std::vector<double> out;
    out.reserve(n);
    switch (spec.kind) {
        case ModelKind::iid_pareto:
            for (std::size_t t = 0; t < n; ++t)
                out.push_back(detail::pareto_quantile(rng.uniform(), spec.alpha));
            break;
        case ModelKind::armax_pareto: {
            detail::ArmaxState s(spec.beta, rng);
            for (std::size_t t = 0; t < spec.burn_in; ++t) s.step(rng);
            for (std::size_t t = 0; t < n; ++t) {
                s.step(rng);
                out.push_back(s.emit(spec.alpha));
            }
            break;
        }
        case ModelKind::ar_pareto: {
            detail::ArState s(spec.beta, rng);
            for (std::size_t t = 0; t < spec.burn_in; ++t) s.step(rng);
            for (std::size_t t = 0; t < n; ++t) {
                s.step(rng);
                out.push_back(s.emit(spec.alpha));
            }
            break;
        }
    }
    return out;
}

// Seeded from the spec itself; identical spec gives a bit-identical series.
inline std::vector<double> simulate(const ModelSpec& spec, std::size_t n) {
    Rng rng(spec.seed);
    return simulate(spec, n, rng);
}

// The (T, r) return level RL = F_r^{<-}(1 - 1/T) of the block-maximum law.
// Exact for the iid model; a Monte Carlo quantile of mc_budget simulated
// disjoint block maxima otherwise (the maxima are streamed, so memory stays
// at O(mc_budget)).
inline double true_return_level(const ModelSpec& spec, double T, std::size_t r,
                                std::size_t mc_budget, Rng& rng) {
    if (!(T >= 2.0)) throw domain_error("true_return_level: T must be at least 2");
    if (r < 1) throw domain_error("true_return_level: r must be at least 1");
    if (spec.kind == ModelKind::iid_pareto) {
        // F_r = F_alpha^r, hence RL = (1 - (1-1/T)^{1/r})^{-1/alpha}.
        const double root = -std::expm1(std::log1p(-1.0 / T) / static_cast<double>(r));
        return std::pow(root, -1.0 / spec.alpha);
    }
    std::vector<double> maxima;
    maxima.reserve(mc_budget);
    if (spec.kind == ModelKind::armax_pareto) {
        detail::ArmaxState s(spec.beta, rng);
        for (std::size_t t = 0; t < spec.burn_in; ++t) s.step(rng);
        for (std::size_t b = 0; b < mc_budget; ++b) {
            double m = -std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < r; ++t) m = std::fmax(m, s.step(rng));
            detail::ArmaxState peak = s;
            peak.latent = m; // the PIT is increasing, so max commutes with it
            maxima.push_back(peak.emit(spec.alpha));
        }
    } else {
        detail::ArState s(spec.beta, rng);
        for (std::size_t t = 0; t < spec.burn_in; ++t) s.step(rng);
        for (std::size_t b = 0; b < mc_budget; ++b) {
            double m = -std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < r; ++t) m = std::fmax(m, s.step(rng));
            detail::ArState peak = s;
            peak.latent = m;
            maxima.push_back(peak.emit(spec.alpha));
        }
    }
    std::sort(maxima.begin(), maxima.end());
    // type-7 quantile at p = 1 - 1/T
    const double h = (1.0 - 1.0 / T) * static_cast<double>(maxima.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= maxima.size()) return maxima.back();
    return maxima[lo] + (h - static_cast<double>(lo)) * (maxima[lo + 1] - maxima[lo]);
}

inline double true_return_level(const ModelSpec& spec, double T, std::size_t r,
                                std::size_t mc_budget = 1000000) {
    Rng rng = Rng::stream(spec.seed, 0x524c5452); // dedicated stream for RL truth
    return true_return_level(spec, T, r, mc_budget, rng);
}

} // namespace toptwo
