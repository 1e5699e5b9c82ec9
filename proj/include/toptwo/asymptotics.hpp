#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "toptwo/bias.hpp"
#include "toptwo/errors.hpp"
#include "toptwo/fw.hpp"
#include "toptwo/special.hpp"

namespace toptwo {

using Vec2 = std::array<double, 2>;
using Vec4 = std::array<double, 4>;
using Mat2 = std::array<std::array<double, 2>, 2>;
using Mat24 = std::array<std::array<double, 4>, 2>;
using Mat4 = std::array<std::array<double, 4>, 4>;

enum class CovScheme { disjoint, sliding, all_blocks };

// Slope of the population score at its root alpha1:
//   -2/alpha1^2 - 2 {U''(w) U(w) - U'(w)^2} / {alpha0^2 U(w)^2},  w = varpi.
inline double psi_slope(double rho0, double alpha0) {
    const double w = varpi(rho0);
    const double alpha1 = w * alpha0;
    const double u = upsilon(rho0, w, 0);
    const double u1 = upsilon(rho0, w, 1);
    const double u2 = upsilon(rho0, w, 2);
    return -2.0 / (alpha1 * alpha1) -
           2.0 * (u2 * u - u1 * u1) / (alpha0 * alpha0 * u * u);
}

// The 2x4 matrix mapping the moment empirical process to the asymptotic
// fluctuations of (alpha_hat, sigma_hat/sigma).
inline Mat24 m_matrix(double rho0, double alpha0) {
    if (!(alpha0 > 0.0)) throw domain_error("m_matrix: alpha0 must be positive");
    const double w = varpi(rho0);
    const double alpha1 = w * alpha0;
    const double u = upsilon(rho0, w, 0);
    const double u1 = upsilon(rho0, w, 1);
    const double slope = psi_slope(rho0, alpha0);
    const double z0 = 0.5 * u;
    const double log_z0 = std::log(z0);
    const double zpow = std::pow(z0, -1.0 / alpha1); // = s1

    Mat24 m{};
    m[0][0] = -2.0 / (u * slope);
    m[0][1] = -2.0 * u1 / (alpha0 * u * u * slope);
    m[0][2] = 1.0 / slope;
    m[0][3] = 1.0 / slope;

    const double lead = zpow / (alpha1 * slope);
    m[1][0] = lead * (u1 / (2.0 * alpha0 * z0 * z0) - log_z0 / (alpha1 * z0));
    m[1][1] = lead * (u1 * u1 / (4.0 * alpha0 * alpha0 * z0 * z0 * z0) -
                      log_z0 / (2.0 * alpha0 * alpha1 * z0 * z0)) -
              zpow / (2.0 * alpha1 * z0);
    m[1][2] = lead * (log_z0 / alpha1 - u1 / (2.0 * alpha0 * z0));
    m[1][3] = m[1][2];
    return m;
}

// Bias-corrected version: a 2x2 left factor applied to m_matrix. Equals
// m_matrix exactly at rho0 = 1.
inline Mat24 m_matrix_bc(double rho0, double alpha0) {
    const Mat24 m = m_matrix(rho0, alpha0);
    const auto [alpha1, s1] = alpha1_s1(rho0, alpha0);
    const double w = varpi(rho0);
    const double a = 1.0 / w;
    const double c = -std::log(s1) / (alpha1 * s1);
    const double d = 1.0 / s1;
    Mat24 out{};
    for (int j = 0; j < 4; ++j) {
        out[0][j] = a * m[0][j];
        out[1][j] = c * m[0][j] + d * m[1][j];
    }
    return out;
}

// Covariance matrix of (f1,...,f4) under SW(alpha, 1); disjoint blocks case.
inline Mat4 cov_disjoint_iid(double alpha) {
    if (!(alpha > 0.0)) throw domain_error("cov_disjoint_iid: alpha must be positive");
    const double g = euler_gamma;
    const double a2 = alpha * alpha;
    Mat4 s{};
    s[0][0] = (3.0 - 10.0 * g + 2.0 * g * g + pi_sq) / a2;
    s[0][1] = (2.0 * g - 5.0) / alpha;
    s[0][2] = (pi_sq / 3.0 - 1.0 - g) / a2;
    s[0][3] = s[0][2];
    s[1][1] = 2.0;
    s[1][2] = -1.0 / alpha;
    s[1][3] = s[1][2];
    s[2][2] = (pi_sq / 6.0 - 1.0) / a2;
    s[2][3] = s[2][2];
    s[3][3] = (pi_sq / 6.0) / a2;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < i; ++j) s[i][j] = s[j][i];
    return s;
}

// Integrated cross-window covariances for the sliding scheme (closed forms
// involving gamma, pi^2, log 2 and zeta(3)).
inline Mat4 cov_sliding_iid(double alpha) {
    if (!(alpha > 0.0)) throw domain_error("cov_sliding_iid: alpha must be positive");
    const double g = euler_gamma;
    const double l2 = ln2;
    const double a2 = alpha * alpha;
    Mat4 s{};
    s[0][0] = (-126.0 * zeta3 - 174.0 + pi_sq * (11.0 + 24.0 * l2) -
               12.0 * g * (pi_sq - 23.0 + (11.0 - 4.0 * l2) * (3.0 * l2)) +
               6.0 * l2 * (46.0 + l2 * (8.0 * l2 - 33.0)) +
               18.0 * g * g * (8.0 * l2 - 5.0)) /
              (12.0 * a2);
    s[0][1] = (11.5 - 0.5 * pi_sq + 6.0 * l2 * l2 - 16.5 * l2 +
               1.5 * g * (8.0 * l2 - 5.0)) /
              alpha;
    s[0][2] = (4.0 - 3.5 * zeta3 + 3.5 * l2 * l2 - 9.0 * l2 + 7.0 * pi_sq / 12.0 -
               g * (pi_sq / 3.0 + 2.0 - 7.0 * l2)) /
              a2;
    s[0][3] = (-1.75 * zeta3 + pi_sq / 3.0 + 4.0 + l2 * (3.0 * l2 - 8.0) +
               g * (-pi_sq / 6.0 - 3.0 + 6.0 * l2)) /
              a2;
    s[1][1] = 12.0 * l2 - 7.5;
    s[1][2] = -(pi_sq / 3.0 + 2.0 - 7.0 * l2) / alpha;
    s[1][3] = -(pi_sq / 6.0 + 3.0 - 6.0 * l2) / alpha;
    s[2][2] = -(pi_sq / 6.0 + 5.0 - 10.0 * l2) / a2;
    s[2][3] = -(pi_sq / 12.0 + 3.0 - 6.0 * l2) / a2;
    // log-moment entry; scales with alpha^-2 like its disjoint counterpart
    s[3][3] = (4.0 * l2 - 2.0) / a2;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < i; ++j) s[i][j] = s[j][i];
    return s;
}

namespace detail {

inline Mat2 sandwich(const Mat24& m, const Mat4& s) {
    // m * s * m^T
    Mat24 ms{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) acc += m[i][k] * s[k][j];
            ms[i][j] = acc;
        }
    Mat2 out{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) acc += ms[i][k] * m[j][k];
            out[i][j] = acc;
        }
    return out;
}

// Printed max-only covariance constants (3-4 significant decimals, quoted
// from the literature); entry (1,1) scales with alpha^2, entry (2,2) with
// alpha^{-2}.
inline Mat2 scaled_constant_cov(double v11, double v12, double v22, double alpha) {
    return Mat2{{{v11 * alpha * alpha, v12}, {v12, v22 / (alpha * alpha)}}};
}

} // namespace detail

// Asymptotic 2x2 covariance of (shape, scale) estimators under an iid
// series. The top-two covariances are exact matrix products; the max-only
// ones are stored literature constants.
inline Mat2 estimator_cov(FitMethod method, CovScheme scheme, double alpha) {
    if (!(alpha > 0.0)) throw domain_error("estimator_cov: alpha must be positive");
    if (method == FitMethod::toptwo) {
        const Mat24 m1 = m_matrix(1.0, alpha);
        switch (scheme) {
            case CovScheme::disjoint:
                return detail::sandwich(m1, cov_disjoint_iid(alpha));
            case CovScheme::sliding: {
                // Sliding-scheme convention: the empirical-process covariance
                // is twice the integrated cross-window matrix.
                Mat4 s = cov_sliding_iid(alpha);
                for (auto& row : s)
                    for (auto& v : row) v *= 2.0;
                return detail::sandwich(m1, s);
            }
            case CovScheme::all_blocks:
                throw domain_error("estimator_cov: no all-blocks top-two estimator");
        }
    }
    switch (scheme) {
        case CovScheme::disjoint: return detail::scaled_constant_cov(0.608, -0.257, 1.109, alpha);
        case CovScheme::sliding: return detail::scaled_constant_cov(0.495, -0.324, 0.958, alpha);
        case CovScheme::all_blocks:
            return detail::scaled_constant_cov(0.3927, -0.3767, 0.7483, alpha);
    }
    throw domain_error("estimator_cov: invalid scheme");
}

// Asymptotic bias vector B(alpha0, tau) of the moment empirical process for
// an iid series under the second-order condition (tau <= 0).
inline Vec4 bias_vector_iid(double alpha0, double tau, double lambda1, double lambda2) {
    if (!(alpha0 > 0.0)) throw domain_error("bias_vector_iid: alpha0 must be positive");
    if (tau > 0.0) throw domain_error("bias_vector_iid: tau must be non-positive");
    if (lambda1 < 0.0) throw domain_error("bias_vector_iid: lambda1 must be non-negative");
    const double g = euler_gamma;
    Vec4 b{lambda1 / alpha0 * (5.0 - 2.0 * g), lambda1 / alpha0 * (-2.0 * alpha0),
           lambda1 / alpha0, 0.0};
    if (tau == 0.0) {
        const double c = lambda2 / (alpha0 * alpha0);
        b[0] += c * (8.0 * g - 2.0 * g * g - 5.0 - pi_sq / 3.0);
        b[1] += c * alpha0 * (3.0 - 2.0 * g);
        b[2] += c * (g - 1.0);
        b[3] += c * g;
    } else {
        const double tbar = -tau / alpha0;
        const double c = lambda2 / (tbar * alpha0 * alpha0);
        b[0] += c * (5.0 - 2.0 * g - gamma_fn(3.0 + tbar) - gamma_deriv1(3.0 + tbar));
        b[1] += c * alpha0 * (gamma_fn(3.0 + tbar) - 2.0);
        b[2] += c * (1.0 - gamma_fn(2.0 + tbar));
        b[3] += c * (1.0 - gamma_fn(1.0 + tbar));
    }
    return b;
}

// Bundle of the closed-form asymptotic objects for one (rho0, alpha0, scheme).
struct AsymptoticReport {
    Mat24 m_matrix;
    Mat24 m_matrix_bc;
    Mat4 sigma4;               // iid 4x4 for the requested scheme
    Mat2 estimator_cov_toptwo; // iid 2x2, top-two
    Mat2 estimator_cov_max;    // iid 2x2, max-only
    double varpi = 1.0;
    double alpha1 = 0.0;
    double s1 = 1.0;
    std::optional<Vec2> bias2; // M1 * B(alpha0, tau) when requested
};

inline AsymptoticReport asymptotic_report(double rho0, double alpha0, CovScheme scheme,
                                          std::optional<double> tau = std::nullopt,
                                          double lambda1 = 0.0, double lambda2 = 0.0) {
    AsymptoticReport rep;
    rep.m_matrix = m_matrix(rho0, alpha0);
    rep.m_matrix_bc = m_matrix_bc(rho0, alpha0);
    rep.sigma4 = scheme == CovScheme::sliding ? cov_sliding_iid(alpha0)
                                              : cov_disjoint_iid(alpha0);
    rep.estimator_cov_toptwo =
        estimator_cov(FitMethod::toptwo,
                      scheme == CovScheme::all_blocks ? CovScheme::sliding : scheme, alpha0);
    rep.estimator_cov_max = estimator_cov(FitMethod::maxonly, scheme, alpha0);
    rep.varpi = varpi(rho0);
    const auto [a1, s1] = alpha1_s1(rho0, alpha0);
    rep.alpha1 = a1;
    rep.s1 = s1;
    if (tau) {
        const Vec4 b = bias_vector_iid(alpha0, *tau, lambda1, lambda2);
        const Mat24 m1 = m_matrix(1.0, alpha0);
        Vec2 b2{0.0, 0.0};
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 4; ++k) b2[i] += m1[i][k] * b[k];
        rep.bias2 = b2;
    }
    return rep;
}

} // namespace toptwo
