#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "toptwo/errors.hpp"
#include "toptwo/rho.hpp"
#include "toptwo/rng.hpp"
#include "toptwo/special.hpp"

namespace toptwo {

// Parameters of the Frechet-Welsch distribution W(rho, alpha, sigma): the
// joint limit law of normalized blockwise (max, second-max) pairs.
struct FrechetWelschParams {
    RhoFunction rho;
    double alpha; // shape, > 0
    double sigma; // scale, > 0

    FrechetWelschParams(RhoFunction r, double a, double s)
        : rho(std::move(r)), alpha(a), sigma(s) {
        if (!(alpha > 0.0)) throw domain_error("FrechetWelschParams: alpha must be positive");
        if (!(sigma > 0.0)) throw domain_error("FrechetWelschParams: sigma must be positive");
    }
};

// Joint cdf H_{rho,alpha,sigma}(x, y).
inline double fw_cdf(const FrechetWelschParams& p, double x, double y) {
    if (!(x > 0.0) || !(y > 0.0))
        throw domain_error("fw_cdf: arguments must be positive");
    const double xs = std::pow(x / p.sigma, -p.alpha);
    if (y >= x) return std::exp(-xs);
    const double ys = std::pow(y / p.sigma, -p.alpha);
    const double eta = std::pow(y / x, p.alpha);
    return std::exp(-ys) * (1.0 + p.rho(eta) * ys);
}

// Marginal cdf; which = 1 is the max margin (Frechet), which = 2 the
// second-max margin, which depends on rho only through rho(0).
inline double fw_marginal_cdf(const FrechetWelschParams& p, int which, double t) {
    if (!(t > 0.0)) throw domain_error("fw_marginal_cdf: t must be positive");
    const double q = std::pow(t / p.sigma, -p.alpha);
    if (which == 1) return std::exp(-q);
    if (which == 2) return std::exp(-q) * (1.0 + p.rho.rho0() * q);
    throw domain_error("fw_marginal_cdf: which must be 1 or 2");
}

// Log-density of the standard Frechet-Welsch distribution SW(alpha, sigma),
// supported on {x > y > 0}.
inline double sw_log_density(double alpha, double sigma, double x, double y) {
    if (!(alpha > 0.0) || !(sigma > 0.0))
        throw domain_error("sw_log_density: parameters must be positive");
    if (!(y > 0.0) || !(x > y))
        throw support_error("sw_log_density: support requires x > y > 0");
    return 2.0 * std::log(alpha) + 2.0 * alpha * std::log(sigma) -
           (alpha + 1.0) * (std::log(x) + std::log(y)) -
           std::pow(y / sigma, -alpha);
}

// Exact sampler for SW(alpha, sigma): with E1, E2 iid unit exponentials,
// (X, Y) = sigma * (E1^{-1/alpha}, (E1+E2)^{-1/alpha}) has the SW density.
inline std::vector<std::pair<double, double>>
sample_sw(double alpha, double sigma, std::size_t n, Rng& rng) {
    if (!(alpha > 0.0) || !(sigma > 0.0))
        throw domain_error("sample_sw: parameters must be positive");
    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    const double inv_alpha = 1.0 / alpha;
    for (std::size_t i = 0; i < n; ++i) {
        const double t1 = -std::log(rng.uniform());
        const double t2 = t1 - std::log(rng.uniform());
        out.emplace_back(sigma * std::pow(t1, -inv_alpha),
                         sigma * std::pow(t2, -inv_alpha));
    }
    return out;
}

// Upsilon_{rho0}(x) = rho0 * Gamma(x+2) + (1-rho0) * Gamma(x+1), or its
// first or second derivative.
inline double upsilon(double rho0, double x, int order = 0) {
    if (!(x > -1.0)) throw domain_error("upsilon: argument must exceed -1");
    if (!(rho0 >= 0.0 && rho0 <= 1.0)) throw domain_error("upsilon: rho0 must lie in [0,1]");
    switch (order) {
        case 0: return rho0 * gamma_fn(x + 2.0) + (1.0 - rho0) * gamma_fn(x + 1.0);
        case 1: return rho0 * gamma_deriv1(x + 2.0) + (1.0 - rho0) * gamma_deriv1(x + 1.0);
        case 2: return rho0 * gamma_deriv2(x + 2.0) + (1.0 - rho0) * gamma_deriv2(x + 1.0);
        default: throw domain_error("upsilon: order must be 0, 1 or 2");
    }
}

// Exact moment int y^{-alpha} (log y)^m dH2 of the second margin of
// W(rho, alpha0, 1): equals (-1/alpha0)^m * Upsilon^{(m)}(alpha/alpha0).
inline double second_marginal_moment(double rho0, double alpha0, double alpha, int m) {
    if (!(alpha0 > 0.0)) throw domain_error("second_marginal_moment: alpha0 must be positive");
    if (!(alpha > -alpha0))
        throw domain_error("second_marginal_moment: moment diverges for alpha <= -alpha0");
    const double u = upsilon(rho0, alpha / alpha0, m);
    switch (m) {
        case 0: return u;
        case 1: return -u / alpha0;
        case 2: return u / (alpha0 * alpha0);
        default: throw domain_error("second_marginal_moment: m must be 0, 1 or 2");
    }
}

} // namespace toptwo
