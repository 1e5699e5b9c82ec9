#include <doctest.h>

#include <cmath>
#include <vector>

#include "test_util.hpp"
#include "toptwo/fw.hpp"

using namespace toptwo;

namespace {
FrechetWelschParams std_indep(double alpha = 1.0, double sigma = 1.0) {
    return FrechetWelschParams(RhoFunction::independence(), alpha, sigma);
}
} // namespace

TEST_CASE("joint cdf on both branches") {
    const auto p = std_indep();
    CHECK(fw_cdf(p, 1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(fw_cdf(p, 2.0, 1.0) == doctest::Approx(std::exp(-1.0) * 1.5).epsilon(1e-14));
    CHECK(fw_cdf(p, 2.0, 1.0) == doctest::Approx(0.551819).epsilon(1e-5));

    const FrechetWelschParams dep(RhoFunction::linear(0.0), 1.0, 1.0);
    CHECK(fw_cdf(dep, 2.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

    CHECK_THROWS_AS(fw_cdf(p, -1.0, 1.0), domain_error);
    CHECK_THROWS_AS(fw_cdf(p, 1.0, 0.0), domain_error);
}

TEST_CASE("upper branch equals the first marginal exactly") {
    const FrechetWelschParams p(RhoFunction::kink(0.4), 1.7, 2.3);
    for (double x : {0.2, 1.0, 3.5, 10.0})
        for (double y : {1.0, 1.5, 4.0, 20.0})
            if (y >= x) CHECK(fw_cdf(p, x, y) == fw_marginal_cdf(p, 1, x));
}

TEST_CASE("cdf is non-decreasing in each argument") {
    const FrechetWelschParams p(RhoFunction::power(1.8), 1.3, 0.7);
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        const double x = 0.1 + 5.0 * rng.uniform();
        const double y = 0.1 + 5.0 * rng.uniform();
        const double h = 1e-3;
        const double v = fw_cdf(p, x, y);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(fw_cdf(p, x + h, y) >= v - 1e-12);
        CHECK(fw_cdf(p, x, y + h) >= v - 1e-12);
    }
}

TEST_CASE("x to infinity recovers the second marginal") {
    for (double alpha : {2.0, 3.0}) {
        const FrechetWelschParams p(RhoFunction::kink(0.6), alpha, 1.1);
        for (double y : {0.5, 1.0, 2.0})
            CHECK(fw_cdf(p, 1e8, y) ==
                  doctest::Approx(fw_marginal_cdf(p, 2, y)).epsilon(1e-10));
    }
}

TEST_CASE("power rho with c near 1 approaches the independence cdf") {
    const FrechetWelschParams pw(RhoFunction::power(1.0 + 1e-6), 1.0, 1.0);
    const auto ind = std_indep();
    for (double x : {0.5, 1.0, 2.0, 4.0})
        for (double y : {0.3, 0.9, 1.7})
            CHECK(fw_cdf(pw, x, y) == doctest::Approx(fw_cdf(ind, x, y)).epsilon(1e-4));
}

TEST_CASE("marginal cdfs") {
    const auto p = std_indep();
    CHECK(fw_marginal_cdf(p, 1, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(fw_marginal_cdf(p, 2, 1.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));

    const FrechetWelschParams rho_zero(RhoFunction::linear(0.0), 1.4, 2.0);
    for (double t : {0.5, 1.0, 3.0, 9.0})
        CHECK(fw_marginal_cdf(rho_zero, 2, t) == fw_marginal_cdf(rho_zero, 1, t));

    CHECK_THROWS_AS(fw_marginal_cdf(p, 1, 0.0), domain_error);
    CHECK_THROWS_AS(fw_marginal_cdf(p, 3, 1.0), domain_error);
}

TEST_CASE("sw log density value and support") {
    CHECK(sw_log_density(1.0, 1.0, 2.0, 1.0) ==
          doctest::Approx(std::log(0.25 * std::exp(-1.0))).epsilon(1e-12));
    CHECK(sw_log_density(1.0, 1.0, 2.0, 1.0) == doctest::Approx(-2.386294).epsilon(1e-6));
    CHECK_THROWS_AS(sw_log_density(1.0, 1.0, 1.0, 2.0), support_error);
    CHECK_THROWS_AS(sw_log_density(1.0, 1.0, 1.0, 1.0), support_error);
    CHECK_THROWS_AS(sw_log_density(1.0, 1.0, -1.0, -2.0), support_error);
    CHECK_THROWS_AS(sw_log_density(-1.0, 1.0, 2.0, 1.0), domain_error);
}

TEST_CASE("sw density integrates to one") {
    const double alpha = 1.3, sigma = 0.8;
    // integrate in log coordinates: x = sigma e^s, y = sigma e^t, s > t
    const double L = 34.0 / alpha;
    auto inner = [&](double t) {
        if (t + 1e-9 >= L) return 0.0;
        auto f = [&](double s) {
            const double x = sigma * std::exp(s), y = sigma * std::exp(t);
            return std::exp(sw_log_density(alpha, sigma, x, y)) * x * y;
        };
        return test_util::adaptive_simpson(f, t + 1e-9, L, 1e-10);
    };
    const double total = test_util::adaptive_simpson(inner, -L, L, 1e-9);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sw sampler: ordering, marginals, moments") {
    Rng rng(2024);
    const std::size_t n = 100000;
    const double alpha = 1.0, sigma = 1.0;
    const auto sample = sample_sw(alpha, sigma, n, rng);
    REQUIRE(sample.size() == n);

    std::vector<double> xs, ys;
    xs.reserve(n);
    ys.reserve(n);
    for (const auto& [x, y] : sample) {
        CHECK(x > y);
        CHECK(y > 0.0);
        xs.push_back(x);
        ys.push_back(y);
    }

    const auto p = std_indep(alpha, sigma);
    const double bound = 1.63 / std::sqrt(static_cast<double>(n));
    CHECK(test_util::ks_distance(xs, [&](double t) { return fw_marginal_cdf(p, 1, t); }) <
          bound);
    CHECK(test_util::ks_distance(ys, [&](double t) { return fw_marginal_cdf(p, 2, t); }) <
          bound);

    // exact second-marginal moments vs Monte Carlo, within 4 standard errors
    for (int m : {0, 1, 2}) {
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i)
            f[i] = (1.0 / ys[i]) * std::pow(std::log(ys[i]), m);
        const double mc = test_util::mean(f);
        const double se = test_util::sample_sd(f) / std::sqrt(static_cast<double>(n));
        const double exact = second_marginal_moment(1.0, alpha, 1.0, m);
        CHECK(std::fabs(mc - exact) < 4.0 * se);
    }

    Rng rng2(7);
    CHECK(sample_sw(2.0, 1.0, 0, rng2).empty());
}

TEST_CASE("upsilon values and derivatives") {
    CHECK(upsilon(1.0, 1.0, 0) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(upsilon(1.0, 1.0, 1) ==
          doctest::Approx(3.0 - 2.0 * euler_gamma).epsilon(1e-13));
    CHECK(upsilon(0.5, 1.0, 0) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK_THROWS_AS(upsilon(0.5, -1.0, 0), domain_error);
    CHECK_THROWS_AS(upsilon(1.5, 1.0, 0), domain_error);
}

TEST_CASE("second marginal moments") {
    CHECK(second_marginal_moment(1.0, 1.0, 1.0, 0) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(second_marginal_moment(1.0, 1.0, 1.0, 1) ==
          doctest::Approx(2.0 * euler_gamma - 3.0).epsilon(1e-13));
    for (double rho0 : {0.0, 0.3, 1.0})
        CHECK(second_marginal_moment(rho0, 2.0, 0.0, 0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_THROWS_AS(second_marginal_moment(1.0, 1.0, -1.0, 0), domain_error);
}

TEST_CASE("rho function variants and validation") {
    CHECK(RhoFunction::independence()(0.25) == doctest::Approx(0.75));
    CHECK(RhoFunction::independence().rho0() == 1.0);
    CHECK(RhoFunction::linear(0.6)(0.5) == doctest::Approx(0.3));
    CHECK(RhoFunction::power(2.0).rho0() == doctest::Approx(0.5));
    CHECK(RhoFunction::kink(0.4)(0.3) == doctest::Approx(0.4));
    CHECK(RhoFunction::kink(0.4)(0.9) == doctest::Approx(0.1));

    CHECK_THROWS_AS(RhoFunction::linear(1.5), domain_error);
    CHECK_THROWS_AS(RhoFunction::power(1.0), domain_error);
    CHECK_THROWS_AS(RhoFunction::kink(1.0), domain_error);

    // a valid custom function passes the grid check
    const auto ok = RhoFunction::custom([](double eta) { return 0.5 * (1.0 - eta); });
    CHECK(ok.rho0() == doctest::Approx(0.5));
    // convex violates concavity
    CHECK_THROWS_AS(RhoFunction::custom([](double eta) { return (1.0 - eta) * (1.0 - eta); }),
                    domain_error);
    // above the upper envelope
    CHECK_THROWS_AS(RhoFunction::custom([](double) { return 1.0; }), domain_error);
    // below the lower envelope rho0*(1-eta)
    CHECK_THROWS_AS(
        RhoFunction::custom([](double eta) { return eta < 0.5 ? 1.0 - eta : 0.25; }),
        domain_error);
}
