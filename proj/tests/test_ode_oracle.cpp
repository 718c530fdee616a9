#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mmmm/exact_small.hpp"
#include "mmmm/ode_oracle.hpp"
#include "mmmm/stationary.hpp"

#include <random>

using namespace mmmm;

TEST_CASE("initial condition and degenerate horizon") {
    const SystemParamsd p(1.2, 0.8, 6);
    const auto d = integrate(p, 3, 0.0);
    for (int n = 0; n <= 6; ++n) CHECK(d.probabilities(n) == (n == 3 ? 1.0 : 0.0));
    CHECK(d.method == Method::Oracle);
    CHECK_FALSE(d.sum_drift.has_value());
    CHECK_THROWS_AS(integrate(p, 7, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate(p, -1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate(p, 0, -1.0), std::invalid_argument);
}

TEST_CASE("reference value from table D case 3") {
    const auto d = integrate(SystemParamsd(0.9, 10.0, 1), 0, 2.5);
    CHECK(d.probabilities(0) == doctest::Approx(0.173876).epsilon(1e-5));
    CHECK(std::abs(d.probabilities(0) - 0.173876) < 1e-6);
}

TEST_CASE("matches the closed forms") {
    const SystemParamsd p1(0.4, 10.0, 1);
    const auto o1 = integrate_matrix(p1, 0.5);
    CHECK((o1.matrix - exact_m1(p1, 0.5).matrix).cwiseAbs().maxCoeff() < 1e-9);
    const auto id = integrate_matrix(p1, 0.0);
    CHECK((id.matrix - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("conservation and nonnegativity") {
    const OracleConfig cfg;
    const SystemParamsd p(2.0, 1.0, 10);
    const auto pt = integrate_matrix(p, 1.0, cfg);
    for (int i = 0; i <= 10; ++i) {
        CHECK(std::abs(pt.matrix.row(i).sum() - 1.0) < 1e-10);
        CHECK(pt.matrix.row(i).minCoeff() >= -10 * cfg.abs_tol);
    }
    // sum drift before renormalization stays within 10x the relative tolerance
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(11);
    y0(0) = 1.0;
    double drift = 0.0;
    oracle_solve(p, y0, 0.9, cfg, &drift);
    CHECK(drift < 10 * cfg.rel_tol);
}

TEST_CASE("convergence to stationarity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lam(0.2, 3.0), alpha(0.3, 3.0);
    std::uniform_int_distribution<int> mm(1, 10);
    for (int k = 0; k < 4; ++k) {
        const SystemParamsd p(lam(rng), alpha(rng), mm(rng));
        const double horizon = 50.0 * std::max(p.alpha, 1.0 / p.lambda0);
        const auto d = integrate(p, p.m / 2, horizon);
        const auto pi = stationary(p);
        CHECK((d.probabilities - pi).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("semigroup consistency") {
    const SystemParamsd p(1.5, 0.7, 5);
    const double s = 0.6, t = 1.1;
    const auto direct = integrate(p, 2, s + t);
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(6);
    y0(2) = 1.0;
    const auto mid = oracle_solve(p, y0, s);
    const auto chained = oracle_solve(p, mid, t);
    CHECK((direct.probabilities - chained).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("self-consistency under tolerance halving") {
    const SystemParamsd p(2.0, 1.0, 8);
    const OracleConfig loose{1e-8, 1e-10, 10'000'000};
    const OracleConfig tight{0.5e-8, 0.5e-10, 10'000'000};
    const auto a = integrate(p, 0, 1.3, loose);
    const auto b = integrate(p, 0, 1.3, tight);
    CHECK((a.probabilities - b.probabilities).cwiseAbs().maxCoeff() < 10 * tight.rel_tol);
}

TEST_CASE("deterministic given the config") {
    const SystemParamsd p(1.0, 1.0, 7);
    const auto a = integrate(p, 1, 2.2);
    const auto b = integrate(p, 1, 2.2);
    CHECK((a.probabilities - b.probabilities).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("step exhaustion fails loudly with the offending params") {
    const SystemParamsd p(3.0, 0.5, 12);
    const OracleConfig starved{1e-10, 1e-12, 20};
    try {
        integrate(p, 0, 50.0, starved);
        FAIL("expected OracleError");
    } catch (const OracleError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("lambda0=3") != std::string::npos);
        CHECK(msg.find("m=12") != std::string::npos);
    }
}
