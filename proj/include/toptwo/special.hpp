#pragma once

#include <cmath>
#include <limits>

#include "toptwo/errors.hpp"

namespace toptwo {

// Mathematical constants, stored well beyond double precision.
inline constexpr double euler_gamma = 0.5772156649015328606065120900824024;
inline constexpr double pi = 3.1415926535897932384626433832795029;
inline constexpr double pi_sq = 9.8696044010893586188344909998761511;
inline constexpr double ln2 = 0.6931471805599453094172321214581766;
inline constexpr double zeta3 = 1.2020569031595942853997381615114500;

namespace detail {

// Lanczos coefficients (g = 7, n = 9).
inline constexpr double lanczos_g = 7.0;
inline constexpr double lanczos_c[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

inline double lanczos_sum(double z) {
    double s = lanczos_c[0];
    for (int k = 1; k < 9; ++k) s += lanczos_c[k] / (z - 1.0 + k);
    return s;
}

} // namespace detail

// Gamma function via the Lanczos approximation, reflection below 1/2.
inline double gamma_fn(double z) {
    if (std::isnan(z)) return z;
    if (z <= 0.0 && z == std::floor(z))
        throw domain_error("gamma_fn: non-positive integer argument");
    if (z < 0.5)
        return pi / (std::sin(pi * z) * gamma_fn(1.0 - z));
    const double t = z + detail::lanczos_g - 0.5;
    return std::sqrt(2.0 * pi) * std::pow(t, z - 0.5) * std::exp(-t) *
           detail::lanczos_sum(z);
}

inline double log_gamma(double z) {
    if (z <= 0.0) throw domain_error("log_gamma: argument must be positive");
    if (z < 0.5)
        return std::log(pi / std::sin(pi * z)) - log_gamma(1.0 - z);
    const double t = z + detail::lanczos_g - 0.5;
    return 0.5 * std::log(2.0 * pi) + (z - 0.5) * std::log(t) - t +
           std::log(detail::lanczos_sum(z));
}

// Digamma psi(x): recurrence up to x >= 10, then the Bernoulli asymptotic series.
inline double digamma(double x) {
    if (x <= 0.0 && x == std::floor(x))
        throw domain_error("digamma: non-positive integer argument");
    if (x < 0.0)
        return digamma(1.0 - x) - pi / std::tan(pi * x);
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    // ln x - 1/(2x) - sum B_{2k}/(2k x^{2k})
    double series = inv2 * (1.0 / 12.0 +
                    inv2 * (-1.0 / 120.0 +
                    inv2 * (1.0 / 252.0 +
                    inv2 * (-1.0 / 240.0 +
                    inv2 * (1.0 / 132.0 +
                    inv2 * (-691.0 / 32760.0 +
                    inv2 * (1.0 / 12.0)))))));
    return result + std::log(x) - 0.5 * inv - series;
}

// Trigamma psi'(x), same scheme.
inline double trigamma(double x) {
    if (x <= 0.0 && x == std::floor(x))
        throw domain_error("trigamma: non-positive integer argument");
    if (x < 0.0) {
        const double s = pi / std::sin(pi * x);
        return -trigamma(1.0 - x) + s * s;
    }
    double result = 0.0;
    while (x < 10.0) {
        result += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    double series = 1.0 +
                    inv * (0.5 +
                    inv * (1.0 / 6.0 +
                    inv2 * (-1.0 / 30.0 +
                    inv2 * (1.0 / 42.0 +
                    inv2 * (-1.0 / 30.0 +
                    inv2 * (5.0 / 66.0 +
                    inv2 * (-691.0 / 2730.0 +
                    inv2 * (7.0 / 6.0))))))));
    return result + inv * series;
}

// First two derivatives of Gamma, built from psi and psi'.
inline double gamma_deriv1(double z) { return gamma_fn(z) * digamma(z); }

inline double gamma_deriv2(double z) {
    const double psi = digamma(z);
    return gamma_fn(z) * (psi * psi + trigamma(z));
}

} // namespace toptwo
