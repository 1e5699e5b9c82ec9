#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "test_util.hpp"
#include "toptwo/bootstrap.hpp"
#include "toptwo/returns.hpp"
#include "toptwo/rng.hpp"

using namespace toptwo;

TEST_CASE("type-7 quantile") {
    const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
    CHECK(quantile(v, 0.0) == 1.0);
    CHECK(quantile(v, 1.0) == 4.0);
    CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
    CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
    CHECK_THROWS_AS(quantile(std::vector<double>{}, 0.5), domain_error);
}

TEST_CASE("basic ci reflections") {
    std::vector<double> sym;
    for (int i = -100; i <= 100; ++i) sym.push_back(i / 100.0);
    const auto [lo, hi] = basic_ci(0.0, sym, 0.9);
    CHECK(lo == doctest::Approx(-hi).epsilon(1e-12));

    const std::vector<double> flat(80, 10.0);
    CHECK(basic_ci(10.0, flat, 0.95) == std::pair<double, double>(10.0, 10.0));
}

TEST_CASE("replicates preserve length and values") {
    Rng data_rng(10);
    std::vector<double> series(500);
    for (auto& v : series) v = data_rng.uniform();
    Rng rng(77);

    auto result = circular_block_bootstrap(
        series, 25, 60,
        [](std::span<const double> s) { return static_cast<double>(s.size()); }, rng);
    CHECK(result.point == 500.0);
    for (double v : result.replicates) CHECK(v == 500.0);

    // every resampled value comes from the original sample multiset
    std::map<double, int> counts;
    for (double v : series) ++counts[v];
    Rng rng2(78);
    const auto rep = circular_block_resample(series, 25, rng2);
    REQUIRE(rep.size() == series.size());
    for (double v : rep) CHECK(counts.count(v) == 1);
}

TEST_CASE("deterministic under a fixed stream") {
    std::vector<double> series(300);
    Rng data_rng(1);
    for (auto& v : series) v = data_rng.uniform();
    auto stat = [](std::span<const double> s) { return test_util::mean(s); };
    Rng a(5), b(5);
    const auto ra = circular_block_bootstrap(series, 10, 40, stat, a);
    const auto rb = circular_block_bootstrap(series, 10, 40, stat, b);
    CHECK(ra.replicates == rb.replicates);
}

TEST_CASE("bootstrap sd of the mean matches the iid formula") {
    Rng data_rng(314);
    const std::size_t n = 10000;
    std::vector<double> series(n);
    for (auto& v : series) v = data_rng.uniform() + 0.5 * data_rng.uniform();
    auto stat = [](std::span<const double> s) { return test_util::mean(s); };
    Rng rng(2718);
    const auto result = circular_block_bootstrap(series, 10, 500, stat, rng);
    const double expected = test_util::sample_sd(series) / std::sqrt(static_cast<double>(n));
    const double boot_sd = test_util::sample_sd(result.replicates);
    CHECK(std::fabs(boot_sd - expected) / expected < 0.15);
}

TEST_CASE("errors") {
    const std::vector<double> series(30, 1.0);
    auto stat = [](std::span<const double>) { return 0.0; };
    Rng rng(1);
    CHECK_THROWS_AS(circular_block_bootstrap(series, 20, 10, stat, rng),
                    insufficient_data_error);
    CHECK_THROWS_AS(circular_block_bootstrap(series, 10, 0, stat, rng), config_error);
    CHECK_THROWS_AS(basic_ci(0.0, std::vector<double>{1.0}, 1.5), domain_error);
}

TEST_CASE("coverage of the basic interval for the top-two shape") {
    // iid Frechet(3, 1), disjoint top-two fit with bias correction
    const std::size_t n = 2500, r = 50, B = 200;
    auto stat = [&](std::span<const double> s) {
        return fit_series(s, r, Estimator::tt_db).alpha_hat;
    };
    int covered = 0;
    const int outer = 200;
    for (int run = 0; run < outer; ++run) {
        Rng data_rng = Rng::stream(4242, run);
        std::vector<double> series(n);
        for (auto& v : series) v = std::pow(-std::log(data_rng.uniform()), -1.0 / 3.0);
        Rng boot_rng = Rng::stream(777, run);
        const auto result = circular_block_bootstrap(series, r, B, stat, boot_rng, 0.95);
        if (result.ci_basic.first <= 3.0 && 3.0 <= result.ci_basic.second) ++covered;
    }
    const double coverage = covered / static_cast<double>(outer);
    CHECK(coverage >= 0.88);
    CHECK(coverage <= 0.99);
}
