#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "toptwo/brent.hpp"
#include "toptwo/errors.hpp"
#include "toptwo/fw.hpp"
#include "toptwo/mle.hpp"

namespace toptwo {

// Pi_{rho0}(y) = 1/y - Upsilon'(y)/Upsilon(y) + rho0/2 - gamma; a continuous
// decreasing bijection from (0,inf) to R with Pi(1) <= 0.
inline double pi_rho0(double rho0, double y) {
    if (!(y > 0.0)) throw domain_error("pi_rho0: y must be positive");
    if (!(rho0 >= 0.0 && rho0 <= 1.0)) throw domain_error("pi_rho0: rho0 must lie in [0,1]");
    return 1.0 / y - upsilon(rho0, y, 1) / upsilon(rho0, y, 0) + 0.5 * rho0 - euler_gamma;
}

// varpi_{rho0}: the unique zero of Pi_{rho0} in (0,1]. This is the
// multiplicative inconsistency factor of the uncorrected shape estimator.
inline double varpi(double rho0) {
    if (!(rho0 >= 0.0 && rho0 <= 1.0)) throw domain_error("varpi: rho0 must lie in [0,1]");
    auto f = [rho0](double y) { return pi_rho0(rho0, y); };
    double hi = 1.0;
    double fhi = f(hi);
    // Pi(1) = -rho0(1-rho0)/{2(1+rho0)} <= 0; it vanishes exactly at the
    // endpoints, where the root is 1. Anything above is rounding noise.
    if (fhi > -1e-13) {
        if (fhi <= 1e-13) return 1.0;
        while (fhi > 0.0) { // cannot happen analytically; guarded regardless
            hi *= 2.0;
            fhi = f(hi);
            if (hi > 1e6) throw no_root_error("varpi: no sign change found");
        }
    }
    double lo = 1e-4;
    double flo = f(lo);
    while (flo < 0.0) {
        lo *= 0.5;
        flo = f(lo);
    }
    RootOptions opts;
    opts.ftol = 1e-13;
    opts.xtol = 1e-13;
    return brent_root(f, lo, hi, flo, fhi, opts);
}

// Probability limits (alpha1, s1) of the uncorrected estimator:
// alpha1 = varpi * alpha0 and s1 = {2 / Upsilon(varpi)}^{1/alpha1}.
inline std::pair<double, double> alpha1_s1(double rho0, double alpha0) {
    if (!(alpha0 > 0.0)) throw domain_error("alpha1_s1: alpha0 must be positive");
    const double w = varpi(rho0);
    const double alpha1 = w * alpha0;
    const double s1 = std::pow(2.0 / upsilon(rho0, w, 0), 1.0 / alpha1);
    return {alpha1, s1};
}

// Disjoint-blocks estimator of pi(1), the probability that an extremal
// cluster has size one: the share of ordered block pairs (i, j) for which
// exactly one observation of block j exceeds the maximum of block i,
// rescaled by 4 and clipped to [0,1].
inline double estimate_rho0(std::span<const double> series, std::size_t r_prime) {
    if (r_prime < 1) throw domain_error("estimate_rho0: block size must be at least 1");
    const std::size_t k = series.size() / r_prime;
    if (k < 2) throw insufficient_data_error("estimate_rho0: need at least 2 full blocks");
    // Exactly one exceedance of level m within block j <=> max_j > m >= secondmax_j.
    std::vector<double> max1(k), max2(k);
    for (std::size_t b = 0; b < k; ++b) {
        double m1 = -std::numeric_limits<double>::infinity(), m2 = m1;
        for (std::size_t i = b * r_prime; i < (b + 1) * r_prime; ++i) {
            const double v = series[i];
            if (!std::isfinite(v)) throw data_error("estimate_rho0: non-finite value");
            if (v > m1) {
                m2 = m1;
                m1 = v;
            } else if (v > m2) {
                m2 = v;
            }
        }
        max1[b] = m1;
        max2[b] = m2;
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double level = max1[i];
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            if (max1[j] > level && !(max2[j] > level)) ++count;
        }
    }
    const double pihat = 4.0 * static_cast<double>(count) /
                         (static_cast<double>(k) * static_cast<double>(k - 1));
    return std::fmin(std::fmax(pihat, 0.0), 1.0);
}

// Plug-in bias correction: alpha_hat / varpi_hat and
// sigma_hat * {Upsilon_{rho0_hat}(varpi_hat)/2}^{1/alpha_hat}.
inline FitResult bias_correct_fit(const FitResult& fit, double rho0_hat) {
    if (!(rho0_hat >= 0.0 && rho0_hat <= 1.0))
        throw domain_error("bias_correct_fit: rho0_hat must lie in [0,1]");
    const double w = varpi(rho0_hat);
    const double factor = std::pow(upsilon(rho0_hat, w, 0) / 2.0, 1.0 / fit.alpha_hat);
    FitResult corrected = fit;
    corrected.alpha_hat = fit.alpha_hat / w;
    corrected.sigma_hat = fit.sigma_hat * factor;
    corrected.bias_corrected = BiasCorrection{rho0_hat, w, factor};
    return corrected;
}

} // namespace toptwo
