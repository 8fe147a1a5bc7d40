#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sklimit/basis.hpp"
#include "sklimit/estimators.hpp"
#include "sklimit/stable.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

using namespace sklimit;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> stable_draws(double alpha, std::size_t n, std::uint64_t seed) {
    Engine rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = sample_standard_stable(alpha, rng);
    return x;
}

FieldTrajectory random_trajectory(std::size_t modes, std::size_t saved, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    FieldTrajectory t(modes, false);
    std::vector<double> u(modes);
    for (std::size_t i = 0; i < saved; ++i) {
        for (auto& x : u) x = normal(rng);
        t.push(0.1 * static_cast<double>(i), u);
    }
    return t;
}

}  // namespace

TEST_CASE("fractional moment examples", "[estimators]") {
    const std::vector<double> twos{2.0, 2.0, 2.0};
    const auto r = fractional_moment(twos, 0.5, 1.5);
    CHECK_THAT(r.estimate, WithinRel(std::sqrt(2.0), 1e-15));
    CHECK_THAT(r.estimate, WithinAbs(1.41421, 1e-5));
    CHECK(r.ci.low == r.estimate);
    CHECK(r.ci.high == r.estimate);
    CHECK(r.count == 3);
    CHECK(r.order == 0.5);
    CHECK_FALSE(r.warnings.empty());

    const std::vector<double> zeros{0.0, 0.0};
    for (double p : {0.1, 0.7, 1.4}) CHECK(fractional_moment(zeros, p, 1.5).estimate == 0.0);

    CHECK_THROWS_WITH(fractional_moment(twos, 1.5, 1.5), ContainsSubstring("below alpha"));
    CHECK_THROWS(fractional_moment(twos, 1.8, 1.5));
    CHECK_THROWS(fractional_moment(twos, 0.0, 1.5));
    CHECK_THROWS(fractional_moment(std::vector<double>{}, 0.5, 1.5));
}

TEST_CASE("bootstrap interval contains the estimate", "[estimators][property]") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        const auto x = stable_draws(1.3, 500, seed);
        for (double p : {0.3, 0.6, 1.0}) {
            const auto r = fractional_moment(x, p, 1.3);
            CHECK(r.ci.low <= r.estimate);
            CHECK(r.estimate <= r.ci.high);
            const auto again = fractional_moment(x, p, 1.3);
            CHECK(again.ci.low == r.ci.low);
            CHECK(again.ci.high == r.ci.high);
        }
    }
}

TEST_CASE("first absolute moment of the standard law", "[estimators][stable]") {
    std::ifstream in(std::string(SKLIMIT_TEST_DATA) + "/stable_calibration.json");
    REQUIRE(in);
    const auto pinned = nlohmann::json::parse(in);
    const double alpha = pinned.at("alpha").get<double>();
    const auto seed = std::stoull(pinned.at("seed").get<std::string>(), nullptr, 16);
    const auto x = stable_draws(alpha, pinned.at("draws").get<std::size_t>(), seed);

    std::vector<MomentReport> reports;
    for (std::size_t n : {250'000u, 500'000u, 1'000'000u}) {
        reports.push_back(fractional_moment(std::span<const double>(x.data(), n), 1.0, alpha));
    }
    for (std::size_t i = 0; i + 1 < reports.size(); ++i) {
        INFO("n step " << i);
        CHECK(std::abs(reports[i + 1].estimate - reports[i].estimate) < 3.0 * reports[i].standard_error);
    }
    const auto& full = reports.back();
    CHECK_THAT(full.estimate, WithinRel(pinned.at("mean_abs").get<double>(), 1e-12));
    // E|S| = (2/pi) Gamma(1 - 1/alpha) for the standard symmetric law.
    const double exact = 2.0 / std::numbers::pi * std::tgamma(1.0 - 1.0 / alpha);
    CHECK_THAT(exact, WithinAbs(1.7055, 1e-4));
    CHECK(std::abs(full.estimate - exact) < 3.0 * full.standard_error);
}

TEST_CASE("Hill estimator", "[estimators]") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> pareto(1'000'000);
    for (auto& v : pareto) v = std::pow(1.0 - unif(rng), -1.0 / 1.5);
    CHECK_THAT(hill_tail_index(pareto, 0.01), WithinAbs(1.5, 0.1));

    std::exponential_distribution<double> expo(1.0);
    std::vector<double> light(100'000);
    for (auto& v : light) v = expo(rng);
    const double small = hill_tail_index(std::span<const double>(light.data(), 10'000), 0.01);
    const double large = hill_tail_index(light, 0.01);
    CHECK(large > 3.0);
    CHECK(small > 3.0);

    CHECK_THAT(hill_tail_index(stable_draws(1.2, 1'000'000, 12), 0.01), WithinAbs(1.2, 0.15));

    CHECK_THROWS(hill_tail_index(std::vector<double>(99, 1.0), 0.1));
    CHECK_THROWS(hill_tail_index(pareto, 0.0));
    CHECK_THROWS(hill_tail_index(pareto, 0.25));
    CHECK_THROWS_WITH(hill_tail_index(std::vector<double>(500, 3.0), 0.1), ContainsSubstring("degenerate"));
}

TEST_CASE("KS statistic matches brute force", "[estimators]") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal;
    for (std::size_t n : {10u, 57u, 300u}) {
        std::vector<double> a(n), b(n + 13);
        for (auto& v : a) v = normal(rng);
        for (auto& v : b) v = 0.3 + normal(rng);
        CHECK_THAT(ks_statistic(a, b), WithinAbs(oracle::ks_brute(a, b), 1e-15));
    }
    const std::vector<double> tied{1, 1, 2, 2, 3};
    const std::vector<double> other{1, 2, 2, 4};
    CHECK_THAT(ks_statistic(tied, other), WithinAbs(oracle::ks_brute(tied, other), 1e-15));
    CHECK(ks_statistic(tied, tied) == 0.0);
    CHECK_THAT(ks_critical_value(100, 100, 0.05), WithinAbs(1.3581 * std::sqrt(0.02), 1e-4));
    CHECK_THROWS(ks_statistic({}, {1.0}));
}

TEST_CASE("least squares fits", "[estimators]") {
    const std::vector<double> eps{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    std::vector<double> dist;
    for (double e : eps) dist.push_back(2.5 * std::sqrt(e));
    const auto fit = log_log_fit(eps, dist);
    CHECK_THAT(fit.slope, WithinAbs(0.5, 1e-12));
    CHECK_THAT(std::exp(fit.intercept), WithinRel(2.5, 1e-12));
    for (double r : fit.residuals) CHECK_THAT(r, WithinAbs(0.0, 1e-12));

    CHECK_THROWS(ols_fit(std::vector<double>{1.0}, std::vector<double>{2.0}));
    CHECK_THROWS(ols_fit(std::vector<double>{1.0, 1.0}, std::vector<double>{2.0, 3.0}));
    CHECK_THROWS(log_log_fit(std::vector<double>{1.0, 2.0}, std::vector<double>{0.0, 3.0}));
}

TEST_CASE("pathwise distance", "[estimators]") {
    const auto basis = make_box_basis(1, 4);
    const auto a = random_trajectory(4, 6, 1);
    CHECK(pathwise_distance(a, a, *basis, -2.0) == 0.0);

    FieldTrajectory x(4, false), y(4, false);
    x.push(1.0, std::vector<double>{0.0, 3.0, 0.0, 0.0});
    y.push(1.0, std::vector<double>{0.0, 0.0, 0.0, 0.0});
    CHECK_THAT(pathwise_distance(x, y, *basis, -2.0), WithinAbs(0.75, 1e-15));
    CHECK_THAT(pathwise_distance(x, y, *basis, -1.0), WithinAbs(1.5, 1e-15));
    CHECK_THAT(pathwise_distance(x, y, *basis, -0.5), WithinAbs(3.0 / std::sqrt(2.0), 1e-15));

    for (double s : {-2.0, -1.0, 0.0, 1.0}) {
        const auto b = random_trajectory(4, 6, 2);
        const auto c = random_trajectory(4, 6, 3);
        const double ab = pathwise_distance(a, b, *basis, s);
        CHECK(ab == pathwise_distance(b, a, *basis, s));
        CHECK(ab <= pathwise_distance(a, c, *basis, s) + pathwise_distance(c, b, *basis, s) + 1e-12);
    }

    CHECK_THROWS_AS(pathwise_distance(a, random_trajectory(4, 5, 2), *basis, -2.0), GridMismatchError);
    CHECK_THROWS_AS(pathwise_distance(a, random_trajectory(3, 6, 2), *basis, -2.0), GridMismatchError);
}
