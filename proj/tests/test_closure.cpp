#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "biconserve/closure.hpp"

using namespace biconserve;

TEST_CASE("admissibility: gcd(l,r)=1 and r < 2l < sqrt(2) r") {
    CHECK(admissible_target(2, 3));
    CHECK(admissible_target(3, 5));
    CHECK(admissible_target(5, 8));
    CHECK(admissible_target(7, 10));

    CHECK_FALSE(admissible_target(1, 1));
    CHECK_FALSE(admissible_target(1, 2));   // 2l = r, not strict
    CHECK_FALSE(admissible_target(2, 4));   // gcd 2
    CHECK_FALSE(admissible_target(3, 4));   // (2l)^2 = 36 >= 32
    CHECK_FALSE(admissible_target(5, 7));   // 100 >= 98
    CHECK_FALSE(admissible_target(4, 6));   // gcd 2
    CHECK_FALSE(admissible_target(0, 3));
    CHECK_FALSE(admissible_target(2, -3));
    // No simple closed curve: l = 1 never qualifies.
    for (int r = 1; r <= 100; ++r) CHECK_FALSE(admissible_target(1, r));
}

TEST_CASE("target angle lies in (pi, sqrt(2) pi)") {
    for (const auto& t : enumerate_targets(40)) {
        CHECK(t.angle() > std::numbers::pi);
        CHECK(t.angle() < std::numbers::sqrt2 * std::numbers::pi);
    }
}

TEST_CASE("enumerate_targets") {
    CHECK_THROWS_AS(enumerate_targets(0), std::invalid_argument);
    CHECK(enumerate_targets(2).empty());

    const auto t5 = enumerate_targets(5);
    REQUIRE(t5.size() == 2);
    CHECK(t5[0].l == 2);
    CHECK(t5[0].r == 3);
    CHECK(t5[1].l == 3);
    CHECK(t5[1].r == 5);

    const auto t8 = enumerate_targets(8);
    for (std::size_t i = 1; i < t8.size(); ++i) {
        CHECK((t8[i - 1].r < t8[i].r ||
               (t8[i - 1].r == t8[i].r && t8[i - 1].l < t8[i].l)));
    }
}

TEST_CASE("solve_level hits the frozen oracles") {
    const ClosureSolution s53 = solve_level({2, 3}, 5, 1.0);
    CHECK(s53.d_solved == doctest::Approx(0.799390684648912).epsilon(1e-9));
    CHECK(std::abs(s53.i_value - 4.0 * std::numbers::pi / 3.0) <= 1e-10);
    CHECK(s53.period == doctest::Approx(std::numbers::pi).epsilon(1e-10));
    CHECK(s53.bracket_lo < s53.d_solved);
    CHECK(s53.d_solved < s53.bracket_hi);

    const ClosureSolution s33 = solve_level({3, 5}, 3, 1.0);
    CHECK(s33.d_solved == doctest::Approx(1.53907406591824).epsilon(1e-9));
    CHECK(std::abs(s33.i_value - 6.0 * std::numbers::pi / 5.0) <= 1e-10);
}

TEST_CASE("solved level re-verifies through an independent evaluation") {
    const ClosureSolution s = solve_level({2, 3}, 4, 1.0);
    const ModelParams mp = ModelParams::make(4, 1.0, s.d_solved);
    const double i_again = closure_integral(mp, analyze(mp));
    CHECK(std::abs(i_again - s.target.angle()) <= 2e-10);
}

TEST_CASE("solutions respect the scaling law") {
    const ClosureSolution base = solve_level({2, 3}, 5, 1.0);
    for (double rho : {0.25, 4.0}) {
        const ClosureSolution scaled = solve_level({2, 3}, 5, rho);
        const double predicted = std::pow(rho, 0.5) * base.d_solved;
        CHECK(scaled.d_solved == doctest::Approx(predicted).epsilon(1e-8));
    }
}

TEST_CASE("every dimension in 3..10 solves both canonical targets") {
    for (int n = 3; n <= 10; ++n) {
        for (const ClosureTarget t : {ClosureTarget{2, 3}, ClosureTarget{3, 5}}) {
            const ClosureSolution s = solve_level(t, n, 1.0);
            CHECK(std::abs(s.i_value - t.angle()) <= 1e-10);
            const double d_star = critical_level(exponent_for_dimension(n), 1.0);
            CHECK(s.d_solved > d_star);
            CHECK(s.d_solved < d_star * 1e6);
        }
    }
}

TEST_CASE("error paths") {
    CHECK_THROWS_AS(solve_level({1, 1}, 5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_level({2, 3}, 5, -1.0), std::domain_error);
    CHECK_THROWS_AS(solve_level({2, 3}, 2, 1.0), std::invalid_argument);
}
