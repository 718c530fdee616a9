#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mmmm/asymptotics.hpp"
#include "mmmm/infinite_server.hpp"
#include "mmmm/ode_oracle.hpp"
#include "mmmm/stationary.hpp"

#include <random>

using namespace mmmm;

namespace {

double poisson_direct(long n, double mean) {
    double p = std::exp(-mean);
    for (long k = 1; k <= n; ++k) p *= mean / double(k);
    return p;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("stirling factor") {
    CHECK(stirling_factor(1) == doctest::Approx(1.084437).epsilon(1e-6));
    CHECK(stirling_factor(10) == doctest::Approx(1.008365).epsilon(1e-6));
    CHECK(std::abs(stirling_factor(1'000'000) - 1.0) < 1e-7);
    CHECK_THROWS_AS(stirling_factor(0), std::invalid_argument);

    double prev = stirling_factor(1);
    for (long n : {2L, 3L, 5L, 10L, 30L, 100L, 1000L}) {
        const double cur = stirling_factor(n);
        CHECK(cur < prev);
        CHECK(cur > 1.0);
        prev = cur;
    }
    // independent route through exact factorials
    double fact = 1.0;
    for (long n = 1; n <= 15; ++n) {
        fact *= double(n);
        const double direct = fact / (std::sqrt(2 * std::numbers::pi * n) * std::pow(double(n) / std::exp(1.0), double(n)));
        CHECK(stirling_factor(n) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("scaled state") {
    const SystemParamsd p(20.0, 1.0, 50);
    const auto s = scaled_state(p, 25, 0.3);
    CHECK(s.x == doctest::Approx(0.5));
    CHECK(s.tau == doctest::Approx(15.0));
    CHECK(s.beta == doctest::Approx(1 - std::exp(-0.3)).epsilon(1e-14));
    CHECK(s.beta >= 0.0);
    CHECK(s.beta < 1.0);
}

TEST_CASE("R1A is the short-time Poisson law") {
    const SystemParamsd p(20.0, 1.0, 100);
    for (int n : {0, 1, 3, 5}) {
        const double t = 0.02;
        CHECK(knessl_p0(p, n, t, RegimeTag::R1A) ==
              doctest::Approx(poisson_direct(n, p.lambda0 * t)).epsilon(1e-12));
    }
}

TEST_CASE("R1B equals the Stirling factor times the infinite-server pmf") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> rho(0.1, 0.9), alpha(0.3, 3.0), tt(0.05, 5.0);
    std::uniform_int_distribution<int> mm(20, 150);
    for (int k = 0; k < 30; ++k) {
        const int m = mm(rng);
        const double a = alpha(rng);
        const SystemParamsd p(rho(rng) * m / a, a, m);
        const double t = tt(rng);
        std::uniform_int_distribution<int> nn(6, m - 6);
        const int n = nn(rng);
        const double lhs = knessl_p0(p, n, t, RegimeTag::R1B);
        const double rhs = stirling_factor(n) * p0n_inf(p, long(n), t);
        if (rhs > 0) CHECK(rel_err(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("corrected R1C equals the infinite-server pmf; printed form carries a stray e") {
    const SystemParamsd p(30.0, 1.0, 100);
    for (int n : {0, 2, 4})
        for (double t : {0.3, 1.0, 4.0}) {
            const double corrected = knessl_p0(p, n, t, RegimeTag::R1C);
            CHECK(rel_err(corrected, p0n_inf(p, long(n), t)) < 1e-12);
            const double printed = knessl_p0(p, n, t, RegimeTag::R1C, FormulaForm::Printed);
            CHECK(rel_err(printed, std::exp(1.0) * corrected) < 1e-12);
        }
}

TEST_CASE("boundary case at l=0 is the blocking development") {
    const SystemParamsd p(25.0, 1.0, 50);
    for (double t : {0.5, 1.0, 3.0})
        CHECK(knessl_p0(p, 50, t, RegimeTag::R1D) ==
              doctest::Approx(blocking_probability(p, 0, t)).epsilon(1e-15));
}

TEST_CASE("printed boundary grouping differs by the documented factor") {
    const SystemParamsd p(25.0, 1.0, 50);
    const double t = 1.0;
    const double corrected = blocking_probability(p, 0, t);
    const double printed = blocking_probability(p, 0, t, FormulaForm::Printed);
    const double rho_beta = p.rho() * saturation_factor(p, t);
    // corrected / printed = (rho beta)^(m-1)
    CHECK(rel_err(corrected / printed, std::pow(rho_beta, double(p.m - 1))) < 1e-9);
}

TEST_CASE("blocking development approaches Erlang B for large t") {
    const SystemParamsd p(25.0, 1.0, 50);
    const double b = erlang_b(p);
    CHECK(rel_err(knessl_p0(p, 50, 20.0 * p.alpha, RegimeTag::R1D), b) < 0.05);

    for (auto [m, rho0] : {std::pair{30, 15.0}, std::pair{50, 25.0}}) {
        const SystemParamsd q(rho0, 1.0, m);
        const double limit = stirling_erlang_limit(q);
        CHECK(rel_err(blocking_probability(q, 0, 100.0 * q.alpha), limit) < 1e-6);
        CHECK(rel_err(blocking_probability(q, 1, 100.0 * q.alpha), limit) < 1e-6);
        CHECK(rel_err(limit, erlang_b(q)) < 2.0 / m);
    }
}

TEST_CASE("R2A branches") {
    const SystemParamsd p(20.0, 1.0, 100);
    const double t = 0.03;
    for (int n : {1, 2, 5})
        CHECK(knessl_p1(p, n, t, RegimeTag::R2A) ==
              doctest::Approx(poisson_direct(n - 1, p.lambda0 * t)).epsilon(1e-12));
    // published n <= 1 branch for n = 0
    CHECK(knessl_p1(p, 0, t, RegimeTag::R2A) ==
          doctest::Approx(std::exp(-p.lambda() * t) * (t / p.alpha)).epsilon(1e-12));
}

TEST_CASE("R2B equals the Stirling factor times the one-customer pmf") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> rho(0.1, 0.9), alpha(0.3, 3.0), tt(0.05, 5.0);
    std::uniform_int_distribution<int> mm(20, 150);
    for (int k = 0; k < 30; ++k) {
        const int m = mm(rng);
        const double a = alpha(rng);
        const SystemParamsd p(rho(rng) * m / a, a, m);
        const double t = tt(rng);
        std::uniform_int_distribution<int> nn(6, m - 6);
        const int n = nn(rng);
        const double lhs = knessl_p1(p, n, t, RegimeTag::R2B);
        const double rhs = stirling_factor(n) * p1n_inf(p, long(n), t);
        if (rhs > 0) CHECK(rel_err(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("R2C evaluates the published form and rejects n=0") {
    const SystemParamsd p(50.0, 1.0, 100);
    const double v = knessl_p1(p, 2, 0.05, RegimeTag::R2C);
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
    CHECK_THROWS_AS(knessl_p1(p, 0, 0.05, RegimeTag::R2C), std::invalid_argument);
}

TEST_CASE("R2D sits within ten percent of the oracle deep in its regime") {
    const SystemParamsd p(50.0, 1.0, 100);
    const double t = p.alpha;
    const double approx = knessl_p1(p, 3, t, RegimeTag::R2D);
    const double truth = integrate(p, 1, t).probabilities(3);
    CHECK(rel_err(approx, truth) < 0.10);
}

TEST_CASE("domain rejection") {
    const SystemParamsd saturated(60.0, 1.0, 50);  // rho > 1
    CHECK_THROWS_AS(knessl_p0(saturated, 10, 1.0, RegimeTag::R1B), std::domain_error);
    const SystemParamsd p(20.0, 1.0, 50);
    CHECK_THROWS_AS(knessl_p0(p, 51, 1.0, RegimeTag::R1B), std::invalid_argument);
    CHECK_THROWS_AS(knessl_p0(p, 10, -1.0, RegimeTag::R1B), std::invalid_argument);
    CHECK_THROWS_AS(knessl_p0(p, 50, 0.0, RegimeTag::R1D), std::invalid_argument);
    CHECK_THROWS_AS(knessl_p0(p, 10, 1.0, RegimeTag::R2B), std::invalid_argument);
    CHECK_THROWS_AS(knessl_p1(p, 10, 1.0, RegimeTag::R1B), std::invalid_argument);
    CHECK_THROWS_AS(knessl_p1(p, 50, 0.0, RegimeTag::R2E), std::invalid_argument);
    CHECK_THROWS_AS(blocking_probability(p, 2, 1.0), std::invalid_argument);
}

TEST_CASE("regime classification") {
    const SystemParamsd p(30.0, 1.0, 100);
    CHECK(classify_regime(p, 50, 1.0, 0) == RegimeTag::R1B);
    CHECK(classify_regime(p, 100, 1.0, 1) == RegimeTag::BLOCK1);
    CHECK(classify_regime(p, 2, 0.01, 0) == RegimeTag::R1A);
    CHECK(classify_regime(p, 2, 0.01, 1) == RegimeTag::R2A);
    CHECK(classify_regime(p, 2, 0.5, 1) == RegimeTag::R2C);   // t sqrt(m) = 5 <= 10
    CHECK(classify_regime(p, 2, 2.0, 1) == RegimeTag::R2D);   // t sqrt(m) = 20
    CHECK(classify_regime(p, 2, 2.0, 0) == RegimeTag::R1C);
    CHECK(classify_regime(p, 97, 1.0, 0) == RegimeTag::R1D);
    CHECK(classify_regime(p, 97, 1.0, 1) == RegimeTag::R2E);

    // thresholds are configuration
    RegimeThresholds wide;
    wide.c_small = 10;
    CHECK(classify_regime(p, 8, 2.0, 0, wide) == RegimeTag::R1C);
    CHECK(classify_regime(p, 8, 2.0, 0) == RegimeTag::R1B);

    CHECK_THROWS_AS(classify_regime(p, 5, 1.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(classify_regime(p, -1, 1.0, 0), std::invalid_argument);

    // every in-domain query maps to exactly one tag without throwing
    for (int n = 0; n <= 100; n += 7)
        for (double t : {0.001, 0.05, 0.5, 3.0})
            for (int n0 : {0, 1}) (void)classify_regime(p, n, t, n0);
}

TEST_CASE("tag round trip") {
    for (RegimeTag tag : {RegimeTag::R1A, RegimeTag::R1D, RegimeTag::R2C, RegimeTag::BLOCK1})
        CHECK(parse_regime_tag(to_string(tag)) == tag);
    CHECK_FALSE(parse_regime_tag("R9Z").has_value());
}

TEST_CASE("bulk and blocking errors shrink as m grows") {
    const double rho = 0.5;
    double prev_bulk = 1e9, prev_block = 1e9;
    for (int m : {25, 50, 100}) {
        const SystemParamsd p(rho * m, 1.0, m);
        const double t = p.alpha;
        const auto oracle = integrate(p, 0, t);
        const double bulk = knessl_p0(p, m / 2, t, RegimeTag::R1B);
        const double block = blocking_probability(p, 0, t);
        const double bulk_err = rel_err(bulk, oracle.probabilities(m / 2));
        const double block_err = rel_err(block, oracle.probabilities(m));
        CHECK(bulk_err < prev_bulk);
        CHECK(block_err < prev_block);
        prev_bulk = bulk_err;
        prev_block = block_err;
    }
}
