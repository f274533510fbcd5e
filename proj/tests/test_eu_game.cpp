#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "drstack/eu_game.hpp"
#include "test_support.hpp"

using namespace drstack;
using drstack::test::Rng;

// Reference optimum for lambda_dr = 2, p_max = 10, frozen from an
// independent high-precision bisection of the cubic
// (10 - P)^3 + 5*(10 - P) - 100 = 0 and cross-checked by grid search in
// the oracle-agreement test below.
constexpr double kOptP = 5.716712392168541;
constexpr double kOptLambdaEu = 0.5450615244401573;
constexpr double kOptEuProfit = 1.781304698121074;

TEST_CASE("dr_upper_bound scales base load by willingness") {
    CHECK(eu::dr_upper_bound(0.03, 230.0) == doctest::Approx(6.9).epsilon(1e-15));
    CHECK(eu::dr_upper_bound(0.0, 100.0) == 0.0);
    CHECK(eu::dr_upper_bound(1.0, 57.0) == 57.0);
    CHECK_THROWS_AS(eu::dr_upper_bound(1.3, 100.0), std::domain_error);
    CHECK_THROWS_AS(eu::dr_upper_bound(-0.1, 100.0), std::domain_error);
    CHECK_THROWS_AS(eu::dr_upper_bound(0.5, -1.0), std::domain_error);
}

TEST_CASE("inconvenience_cost ratio form") {
    CHECK(eu::inconvenience_cost(0.0, 10.0) == 0.0);
    CHECK(eu::inconvenience_cost(5.0, 10.0) == 1.0);
    CHECK(eu::inconvenience_cost(7.5, 10.0) == 3.0);
    CHECK_THROWS_AS(eu::inconvenience_cost(10.0, 10.0), std::domain_error);
    CHECK_THROWS_AS(eu::inconvenience_cost(11.0, 10.0), std::domain_error);
    CHECK_THROWS_AS(eu::inconvenience_cost(-1.0, 10.0), std::domain_error);
    CHECK_THROWS_AS(eu::inconvenience_cost(0.0, 0.0), std::domain_error);
}

TEST_CASE("inconvenience_cost is increasing and convex in p_dr") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const double p_max = rng.uniform(0.5, 300.0);
        double a = rng.uniform(0.0, 0.98) * p_max;
        double b = rng.uniform(0.0, 0.98) * p_max;
        if (a > b) std::swap(a, b);
        CHECK(eu::inconvenience_cost(a, p_max) <= eu::inconvenience_cost(b, p_max));
        const double mid = eu::inconvenience_cost(0.5 * (a + b), p_max);
        const double chord =
            0.5 * (eu::inconvenience_cost(a, p_max) + eu::inconvenience_cost(b, p_max));
        CHECK(mid <= chord + 1e-12);
    }
}

TEST_CASE("eu_profit examples") {
    CHECK(eu::eu_profit(3.7, 0.0, 10.0, 1.0) == 0.0);
    CHECK(eu::eu_profit(2.0, 5.0, 10.0, 1.0) == doctest::Approx(9.0).epsilon(1e-15));
    // Closed-form identity at the interior optimum, unit duration.
    const double profit = eu::eu_profit(kOptLambdaEu, kOptP, 10.0, 1.0);
    const double closed = kOptP / (10.0 - kOptP);
    CHECK(profit == doctest::Approx(closed * closed).epsilon(1e-12));
    CHECK(profit == doctest::Approx(kOptEuProfit).epsilon(1e-12));
    // Duration scales only the revenue term.
    CHECK(eu::eu_profit(2.0, 5.0, 10.0, 2.0) == doctest::Approx(19.0).epsilon(1e-15));
}

TEST_CASE("marginal_leader_value closed form") {
    CHECK(eu::marginal_leader_value(0.0, 2.0, 10.0) == doctest::Approx(1.9).epsilon(1e-15));
    CHECK(eu::marginal_leader_value(5.0, 2.0, 10.0) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(eu::marginal_leader_value(6.0, 2.0, 10.0) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK_THROWS_AS(eu::marginal_leader_value(10.0, 2.0, 10.0), std::domain_error);

    // Strictly decreasing in p_dr.
    Rng rng(12);
    for (int i = 0; i < 200; ++i) {
        const double p_max = rng.uniform(0.5, 400.0);
        const double lambda = rng.uniform(0.0, 20.0);
        double a = rng.uniform(0.0, 0.99) * p_max;
        double b = rng.uniform(0.0, 0.99) * p_max;
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        CHECK(eu::marginal_leader_value(a, lambda, p_max) >
              eu::marginal_leader_value(b, lambda, p_max));
    }
}

TEST_CASE("best_response threshold is exact") {
    CHECK(eu::best_response(0.1, 10.0) == 0.0);   // lambda == 1/p_max
    CHECK(eu::best_response(0.0, 10.0) == 0.0);
    CHECK(eu::best_response(5.0, 0.0) == 0.0);
    CHECK_THROWS_AS(eu::best_response(-1.0, 10.0), std::domain_error);
    CHECK_THROWS_AS(eu::best_response(1.0, -10.0), std::domain_error);
    CHECK_THROWS_AS(eu::best_response(1.0, 10.0, 0.0), std::domain_error);

    Rng rng(13);
    for (int i = 0; i < 500; ++i) {
        const double p_max = rng.uniform(1e-3, 500.0);
        CHECK(eu::best_response(1.0 / p_max, p_max) == 0.0);
        CHECK(eu::best_response(0.999999 / p_max, p_max) == 0.0);
        CHECK(eu::best_response(1.000001 / p_max, p_max) > 0.0);
    }
}

TEST_CASE("best_response solves the first-order condition") {
    const double p = eu::best_response(2.0, 10.0, 1e-12);
    CHECK(p == doctest::Approx(kOptP).epsilon(1e-10));
    CHECK(std::abs(eu::marginal_leader_value(p, 2.0, 10.0)) < 1e-8);

    const double p2 = eu::best_response(0.2, 10.0, 1e-12);
    CHECK(p2 == doctest::Approx(1.6487765151863387).epsilon(1e-10));

    // Stays strictly below capacity even for absurd prices.
    const double p3 = eu::best_response(1e12, 10.0);
    CHECK(p3 < 10.0);
    CHECK(p3 > 9.0);
}

TEST_CASE("best_response agrees with the grid oracle") {
    Rng rng(14);
    for (int i = 0; i < 300; ++i) {
        const double lambda = rng.uniform(0.0, 20.0);
        const double p_max = rng.uniform(1e-6, 500.0);
        const std::int64_t n = 20000;
        const double solver = eu::best_response(lambda, p_max, 1e-10);
        const double oracle = eu::brute_force_best_response(lambda, p_max, n);
        CHECK(std::abs(solver - oracle) <=
              p_max / static_cast<double>(n) + 1e-10 * p_max + 1e-300);
    }
}

TEST_CASE("brute_force_best_response basics") {
    CHECK(eu::brute_force_best_response(0.05, 10.0, 10000) == 0.0);
    CHECK(eu::brute_force_best_response(3.0, 0.0, 100) == 0.0);
    CHECK_THROWS_AS(eu::brute_force_best_response(3.0, 10.0, 1), std::domain_error);
}

TEST_CASE("best_response monotone in price and capacity") {
    Rng rng(15);
    for (int i = 0; i < 200; ++i) {
        const double p_max = rng.uniform(0.5, 400.0);
        const double l1 = rng.uniform(0.0, 10.0);
        const double l2 = l1 + rng.uniform(0.0, 10.0);
        const double slack = 1e-9 * p_max;
        CHECK(eu::best_response(l2, p_max) >= eu::best_response(l1, p_max) - slack);

        const double lambda = rng.uniform(0.0, 10.0);
        const double bigger = p_max * rng.uniform(1.0, 3.0);
        CHECK(eu::best_response(lambda, bigger) >=
              eu::best_response(lambda, p_max) - 1e-9 * bigger);
    }
}

TEST_CASE("recover_eu_price examples and identities") {
    CHECK(eu::recover_eu_price(0.0, 10.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(eu::recover_eu_price(5.0, 10.0) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK_THROWS_AS(eu::recover_eu_price(10.0, 10.0), std::domain_error);

    const double p = eu::best_response(2.0, 10.0, 1e-12);
    const double lambda_eu = eu::recover_eu_price(p, 10.0);
    CHECK(lambda_eu == doctest::Approx(kOptLambdaEu).epsilon(1e-10));
    // Price-ratio identity at the interior optimum.
    CHECK(lambda_eu / 2.0 == doctest::Approx((10.0 - p) / (10.0 + p)).epsilon(1e-9));
}

TEST_CASE("interior-optimum identities over random instances") {
    Rng rng(16);
    int interior = 0;
    for (int i = 0; i < 300; ++i) {
        const double p_max = rng.uniform(0.5, 500.0);
        const double lambda = rng.uniform(1.05 / p_max, 20.0);
        if (lambda <= 1.0 / p_max) continue;
        const double p = eu::best_response(lambda, p_max, 1e-12);
        if (p == 0.0) continue;
        ++interior;
        const double lambda_eu = eu::recover_eu_price(p, p_max);
        CHECK(lambda_eu / lambda ==
              doctest::Approx((p_max - p) / (p_max + p)).epsilon(1e-9));
        CHECK(lambda_eu <= lambda * (1.0 + 1e-12));
        const double r = p / (p_max - p);
        CHECK(eu::eu_profit(lambda_eu, p, p_max, 1.0) ==
              doctest::Approx(r * r).epsilon(1e-9));
        // The optimal EU price falls as capacity grows.
        const double bigger = p_max * 1.5;
        const double p_big = eu::best_response(lambda, bigger, 1e-12);
        CHECK(eu::recover_eu_price(p_big, bigger) <= lambda_eu * (1.0 + 1e-9));
    }
    CHECK(interior > 250);
}

TEST_CASE("leader objective is concave (midpoint above chord)") {
    Rng rng(17);
    auto objective = [](double p, double lambda, double p_max) {
        const double gap = p_max - p;
        return lambda * p - p_max * p / (gap * gap);
    };
    for (int i = 0; i < 300; ++i) {
        const double p_max = rng.uniform(0.5, 300.0);
        const double lambda = rng.uniform(0.0, 20.0);
        const double a = rng.uniform(0.0, 0.99) * p_max;
        const double b = rng.uniform(0.0, 0.99) * p_max;
        const double mid = objective(0.5 * (a + b), lambda, p_max);
        const double chord = 0.5 * (objective(a, lambda, p_max) + objective(b, lambda, p_max));
        CHECK(mid >= chord - 1e-9 * (1.0 + std::abs(chord)));
    }
}

TEST_CASE("verify_kkt at an interior optimum") {
    const double p = eu::best_response(2.0, 10.0);
    eu::EuResponse r{"a", 0, 10.0, p, eu::recover_eu_price(p, 10.0),
                     eu::eu_profit(eu::recover_eu_price(p, 10.0), p, 10.0, 1.0)};
    const auto rec = eu::verify_kkt(2.0, r);
    CHECK(rec.psi == 1);
    CHECK(rec.xi == 1);
    CHECK(rec.mu_lower == 0.0);
    CHECK(rec.mu_upper == 0.0);
    CHECK(rec.big_m == 10.0);
    CHECK(rec.max_residual() <= 1e-8);
}

TEST_CASE("verify_kkt at the zero boundary") {
    // Below threshold with the provider price as the EU price: the lower
    // dual absorbs the gap to the reservation price.
    eu::EuResponse r{"a", 0, 10.0, 0.0, 0.05, 0.0};
    const auto rec = eu::verify_kkt(0.05, r);
    CHECK(rec.mu_lower == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(rec.psi == 0);
    CHECK(rec.xi == 1);
    CHECK(std::abs(rec.stationarity_residual) <= 1e-12);
    CHECK(rec.compl_lower_residual == 0.0);
    CHECK(rec.bound_residual == 0.0);

    // Reservation-price reporting gives a zero dual.
    eu::EuResponse r2{"a", 0, 10.0, 0.0, 0.1, 0.0};
    const auto rec2 = eu::verify_kkt(0.05, r2);
    CHECK(rec2.mu_lower == 0.0);
    CHECK(rec2.psi == 1);
    CHECK(std::abs(rec2.stationarity_residual) <= 1e-15);
}

TEST_CASE("verify_kkt flags a fabricated response") {
    eu::EuResponse r{"a", 0, 10.0, 5.0, 0.0, 0.0};
    const auto rec = eu::verify_kkt(2.0, r);
    CHECK(std::abs(rec.stationarity_residual) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(rec.max_residual() > 0.1);
}

TEST_CASE("verify_kkt contract errors and degenerate capacity") {
    eu::EuResponse bad{"a", 0, 10.0, 10.0, 0.5, 0.0};
    CHECK_THROWS_AS(eu::verify_kkt(1.0, bad), std::invalid_argument);
    eu::EuResponse negative{"a", 0, 10.0, -1.0, 0.5, 0.0};
    CHECK_THROWS_AS(eu::verify_kkt(1.0, negative), std::invalid_argument);
    eu::EuResponse zero_cap{"a", 0, 0.0, 0.0, 0.0, 0.0};
    const auto rec = eu::verify_kkt(1.0, zero_cap);
    CHECK(rec.max_residual() == 0.0);
}
